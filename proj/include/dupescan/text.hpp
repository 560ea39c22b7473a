#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dupescan {
namespace detail {

/// Decodes one UTF-8 sequence starting at i; advances i. Invalid bytes decode
/// to U+FFFD so malformed input degrades to a separator instead of throwing.
inline uint32_t utf8_next(std::string_view s, size_t& i) {
    auto cont = [&](size_t off) {
        return off < s.size() && (static_cast<unsigned char>(s[off]) & 0xC0) == 0x80;
    };
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
        ++i;
        return c;
    }
    if ((c & 0xE0) == 0xC0 && cont(i + 1)) {
        uint32_t cp = (uint32_t{c} & 0x1F) << 6 | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
        i += 2;
        return cp < 0x80 ? 0xFFFD : cp;
    }
    if ((c & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
        uint32_t cp = (uint32_t{c} & 0x0F) << 12 |
                      (uint32_t{static_cast<unsigned char>(s[i + 1])} & 0x3F) << 6 |
                      (static_cast<unsigned char>(s[i + 2]) & 0x3F);
        i += 3;
        return cp < 0x800 ? 0xFFFD : cp;
    }
    if ((c & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
        uint32_t cp = (uint32_t{c} & 0x07) << 18 |
                      (uint32_t{static_cast<unsigned char>(s[i + 1])} & 0x3F) << 12 |
                      (uint32_t{static_cast<unsigned char>(s[i + 2])} & 0x3F) << 6 |
                      (static_cast<unsigned char>(s[i + 3]) & 0x3F);
        i += 4;
        return (cp < 0x10000 || cp > 0x10FFFF) ? 0xFFFD : cp;
    }
    ++i;
    return 0xFFFD;
}

inline void utf8_append(std::string& out, uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

/// Compatibility folding for the mappings that actually show up in manuscript
/// metadata: fullwidth ASCII, common ligatures, ordinal indicators, micro sign,
/// long s. Appends the replacement to out and returns true if cp was folded.
inline bool compat_fold(uint32_t cp, std::vector<uint32_t>& out) {
    if (cp >= 0xFF01 && cp <= 0xFF5E) { // fullwidth ASCII block
        out.push_back(cp - 0xFEE0);
        return true;
    }
    switch (cp) {
        case 0x00A0: case 0x1680: case 0x2007: case 0x202F:
        case 0x205F: case 0x3000:
            out.push_back(' ');
            return true;
        case 0x00AA: out.push_back('a'); return true;  // ordinal a
        case 0x00BA: out.push_back('o'); return true;  // ordinal o
        case 0x00B5: out.push_back(0x03BC); return true; // micro -> mu
        case 0x017F: out.push_back('s'); return true;  // long s
        case 0x0132: case 0x0133: out.push_back('i'); out.push_back('j'); return true;
        case 0xFB00: out.push_back('f'); out.push_back('f'); return true;
        case 0xFB01: out.push_back('f'); out.push_back('i'); return true;
        case 0xFB02: out.push_back('f'); out.push_back('l'); return true;
        case 0xFB03: out.push_back('f'); out.push_back('f'); out.push_back('i'); return true;
        case 0xFB04: out.push_back('f'); out.push_back('f'); out.push_back('l'); return true;
        case 0xFB05: case 0xFB06: out.push_back('s'); out.push_back('t'); return true;
        default: return false;
    }
}

inline uint32_t to_lower_cp(uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;   // Latin-1
    if ((cp >= 0x0100 && cp <= 0x0137) || (cp >= 0x014A && cp <= 0x0177)) {
        return (cp % 2 == 0) ? cp + 1 : cp;                          // Latin Ext-A pairs
    }
    if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp == 0x0178) return 0xFF;                                   // Y diaeresis
    if (cp == 0x0179 || cp == 0x017B || cp == 0x017D) return cp + 1;
    if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) return cp + 0x20; // Greek
    if (cp >= 0x0410 && cp <= 0x042F) return cp + 0x20;              // Cyrillic
    if (cp >= 0x0400 && cp <= 0x040F) return cp + 0x50;
    if ((cp >= 0x1E00 && cp <= 0x1E95) || (cp >= 0x1EA0 && cp <= 0x1EFF)) {
        return (cp % 2 == 0) ? cp + 1 : cp;                          // Latin Ext Additional
    }
    return cp;
}

/// Composes a lowercase Latin base with a combining mark where a precomposed
/// Latin-1 letter exists. Returns 0 when the pair does not compose.
inline uint32_t compose_mark(uint32_t base, uint32_t mark) {
    switch (base) {
        case 'a':
            switch (mark) {
                case 0x0300: return 0xE0; case 0x0301: return 0xE1;
                case 0x0302: return 0xE2; case 0x0303: return 0xE3;
                case 0x0308: return 0xE4; case 0x030A: return 0xE5;
            }
            break;
        case 'c':
            if (mark == 0x0327) return 0xE7;
            break;
        case 'e':
            switch (mark) {
                case 0x0300: return 0xE8; case 0x0301: return 0xE9;
                case 0x0302: return 0xEA; case 0x0308: return 0xEB;
            }
            break;
        case 'i':
            switch (mark) {
                case 0x0300: return 0xEC; case 0x0301: return 0xED;
                case 0x0302: return 0xEE; case 0x0308: return 0xEF;
            }
            break;
        case 'n':
            if (mark == 0x0303) return 0xF1;
            break;
        case 'o':
            switch (mark) {
                case 0x0300: return 0xF2; case 0x0301: return 0xF3;
                case 0x0302: return 0xF4; case 0x0303: return 0xF5;
                case 0x0308: return 0xF6;
            }
            break;
        case 'u':
            switch (mark) {
                case 0x0300: return 0xF9; case 0x0301: return 0xFA;
                case 0x0302: return 0xFB; case 0x0308: return 0xFC;
            }
            break;
        case 'y':
            if (mark == 0x0301) return 0xFD;
            if (mark == 0x0308) return 0xFF;
            break;
    }
    return 0;
}

inline bool is_combining_mark(uint32_t cp) { return cp >= 0x0300 && cp <= 0x036F; }

/// Word characters are ASCII alphanumerics plus any non-ASCII codepoint outside
/// the punctuation, symbol, and separator blocks below. Scripts without case or
/// compatibility handling (CJK, Arabic, ...) pass through unchanged.
inline bool is_word_cp(uint32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    if (cp <= 0xA0) return false;                        // C1 controls, NBSP
    if (cp >= 0xA1 && cp <= 0xBF) return false;          // Latin-1 punctuation
    if (cp == 0xD7 || cp == 0xF7) return false;          // multiply / divide signs
    if (cp >= 0x2000 && cp <= 0x2BFF) return false;      // punctuation, symbols, arrows, math
    if (cp >= 0x2E00 && cp <= 0x2E7F) return false;      // supplemental punctuation
    if (cp >= 0x3000 && cp <= 0x303F) return false;      // CJK symbols and punctuation
    if (cp >= 0xFE10 && cp <= 0xFE6F) return false;      // vertical / small / compat forms
    if (cp >= 0xFF5F && cp <= 0xFF65) return false;      // fullwidth brackets
    if (cp >= 0xFFE0 && cp <= 0xFFEE) return false;      // fullwidth signs
    if (cp == 0xFFFD) return false;                      // decode errors separate tokens
    return true;
}

} // namespace detail

/// Normalizes text to lowercase word tokens: compatibility-folds common forms,
/// composes combining accents onto Latin letters, maps punctuation to spaces,
/// and collapses whitespace. Deterministic and locale-independent.
inline std::vector<std::string> normalize(std::string_view text) {
    std::vector<uint32_t> cps;
    cps.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        uint32_t raw = detail::utf8_next(text, i);
        std::vector<uint32_t> folded;
        if (detail::compat_fold(raw, folded)) {
            for (uint32_t f : folded) cps.push_back(detail::to_lower_cp(f));
        } else {
            cps.push_back(detail::to_lower_cp(raw));
        }
    }

    // Compose combining marks with the preceding base where possible.
    std::vector<uint32_t> composed;
    composed.reserve(cps.size());
    for (uint32_t cp : cps) {
        if (detail::is_combining_mark(cp) && !composed.empty()) {
            if (uint32_t pre = detail::compose_mark(composed.back(), cp); pre != 0) {
                composed.back() = pre;
                continue;
            }
        }
        composed.push_back(cp);
    }

    std::vector<std::string> tokens;
    std::string current;
    for (uint32_t cp : composed) {
        if (detail::is_word_cp(cp)) {
            detail::utf8_append(current, cp);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

} // namespace dupescan
