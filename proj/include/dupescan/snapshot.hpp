#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "dupescan/config.hpp"
#include "dupescan/corpus.hpp"
#include "dupescan/errors.hpp"
#include "dupescan/hashing.hpp"
#include "dupescan/lsh.hpp"
#include "dupescan/minhash.hpp"
#include "dupescan/shingle.hpp"

namespace dupescan {

/// Everything needed to re-run verification and analytics without
/// re-hashing: config, corpus, shingle sets, the hash family, and the
/// populated index. Serialization is canonical, so save(load(save(x)))
/// is byte-identical to save(x).
struct Snapshot {
    PipelineConfig config;
    Corpus corpus;
    std::vector<ShingleSet> shingles; // aligned with corpus records
    HashFamily family;
    LshIndex index;
};

namespace detail {

inline constexpr char kSnapshotMagic[8] = {'D', 'U', 'P', 'E', 'S', 'N', 'A', 'P'};
inline constexpr uint32_t kSnapshotVersion = 1;

class BinWriter {
public:
    void u8(uint8_t v) { bytes_.push_back(static_cast<char>(v)); }

    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }

    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }

    void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }

    void f64(double v) {
        uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        u64(bits);
    }

    void str(const std::string& s) {
        u32(static_cast<uint32_t>(s.size()));
        bytes_.insert(bytes_.end(), s.begin(), s.end());
    }

    const std::string& bytes() const { return bytes_; }

private:
    std::string bytes_;
};

class BinReader {
public:
    explicit BinReader(std::string bytes) : bytes_(std::move(bytes)) {}

    uint8_t u8() { return static_cast<uint8_t>(take(1)[0]); }

    uint32_t u32() {
        const char* p = take(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t{static_cast<unsigned char>(p[i])} << (8 * i);
        return v;
    }

    uint64_t u64() {
        const char* p = take(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t{static_cast<unsigned char>(p[i])} << (8 * i);
        return v;
    }

    int32_t i32() { return static_cast<int32_t>(u32()); }

    double f64() {
        uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

    std::string str() {
        uint32_t n = u32();
        const char* p = take(n);
        return std::string(p, n);
    }

    size_t pos() const { return pos_; }
    size_t remaining() const { return bytes_.size() - pos_; }

private:
    const char* take(size_t n) {
        if (pos_ + n > bytes_.size()) throw SnapshotError("snapshot truncated or corrupt");
        const char* p = bytes_.data() + pos_;
        pos_ += n;
        return p;
    }

    std::string bytes_;
    size_t pos_ = 0;
};

} // namespace detail

inline std::string serialize_snapshot(const Snapshot& snapshot) {
    if (snapshot.shingles.size() != snapshot.corpus.size()) {
        throw SnapshotError("shingle sets not aligned with corpus");
    }
    detail::BinWriter w;
    w.u32(detail::kSnapshotVersion);

    const auto& c = snapshot.config;
    w.u32(static_cast<uint32_t>(c.shingle_k));
    w.u32(c.num_hashes);
    w.u32(c.bands);
    w.u32(c.rows);
    w.f64(c.threshold);
    w.u64(c.seed);
    w.u8(c.analysis_date ? 1 : 0);
    w.i32(c.analysis_date ? c.analysis_date->days : 0);
    w.u32(c.min_support);

    w.u32(snapshot.family.n);
    w.u64(snapshot.family.seed);
    for (uint32_t i = 0; i < snapshot.family.n; ++i) {
        w.u64(snapshot.family.a[i]);
        w.u64(snapshot.family.b[i]);
    }

    w.u64(snapshot.corpus.size());
    for (const auto& rec : snapshot.corpus.records()) {
        w.str(rec.id);
        w.str(rec.journal_id);
        w.str(rec.title);
        w.str(rec.abstract);
        w.i32(rec.submitted_at.days);
        w.u8(rec.decided_at ? 1 : 0);
        w.i32(rec.decided_at ? rec.decided_at->days : 0);
        w.u8(static_cast<uint8_t>(rec.decision));
        w.u8(rec.transferred_from ? 1 : 0);
        w.str(rec.transferred_from ? *rec.transferred_from : std::string());
    }

    for (const auto& set : snapshot.shingles) {
        w.u8(set.too_short ? 1 : 0);
        w.u32(set.token_count);
        w.u32(static_cast<uint32_t>(set.shingles.size()));
        for (uint64_t v : set.shingles) w.u64(v);
    }

    const auto& index = snapshot.index;
    w.u32(index.bands());
    w.u32(index.rows());
    w.u64(static_cast<uint64_t>(index.size()));
    for (const auto& sig : index.signatures()) {
        w.str(sig.manuscript_id);
        w.u64(sig.family_tag);
        for (uint64_t v : sig.values) w.u64(v);
    }
    for (const auto& table : index.tables()) {
        // buckets sorted by key for a canonical byte stream
        std::vector<std::pair<uint64_t, const LshIndex::Bucket*>> entries;
        entries.reserve(table.size());
        for (const auto& [key, bucket] : table) entries.emplace_back(key, &bucket);
        std::sort(entries.begin(), entries.end());
        w.u32(static_cast<uint32_t>(entries.size()));
        for (const auto& [key, bucket] : entries) {
            w.u64(key);
            w.u32(static_cast<uint32_t>(bucket->size()));
            for (uint32_t pos : *bucket) w.u32(pos);
        }
    }

    std::string payload = w.bytes();
    // trailing checksum guards against truncation and bit corruption
    uint64_t checksum = fnv1a64(payload.data(), payload.size());
    std::string result(detail::kSnapshotMagic, sizeof(detail::kSnapshotMagic));
    result += payload;
    detail::BinWriter tail;
    tail.u64(checksum);
    result += tail.bytes();
    return result;
}

inline Snapshot deserialize_snapshot(std::string bytes) {
    if (bytes.size() < sizeof(detail::kSnapshotMagic) + 8 ||
        std::memcmp(bytes.data(), detail::kSnapshotMagic, sizeof(detail::kSnapshotMagic)) != 0) {
        throw SnapshotError("not a dupescan snapshot file");
    }
    std::string payload = bytes.substr(sizeof(detail::kSnapshotMagic),
                                       bytes.size() - sizeof(detail::kSnapshotMagic) - 8);
    detail::BinReader tail(bytes.substr(bytes.size() - 8));
    uint64_t stored = tail.u64();
    if (fnv1a64(payload.data(), payload.size()) != stored) {
        throw SnapshotError("snapshot checksum mismatch (corrupt file)");
    }

    detail::BinReader r(std::move(payload));
    uint32_t version = r.u32();
    if (version != detail::kSnapshotVersion) {
        throw SnapshotError("unsupported snapshot format version " + std::to_string(version));
    }

    Snapshot snapshot;
    auto& c = snapshot.config;
    c.shingle_k = static_cast<int>(r.u32());
    c.num_hashes = r.u32();
    c.bands = r.u32();
    c.rows = r.u32();
    c.threshold = r.f64();
    c.seed = r.u64();
    uint8_t has_date = r.u8();
    int32_t date_days = r.i32();
    if (has_date) c.analysis_date = Date{date_days};
    c.min_support = r.u32();

    auto& family = snapshot.family;
    family.n = r.u32();
    family.seed = r.u64();
    family.a.resize(family.n);
    family.b.resize(family.n);
    for (uint32_t i = 0; i < family.n; ++i) {
        family.a[i] = r.u64();
        family.b[i] = r.u64();
    }
    family.tag = mix64(family.seed ^ (uint64_t{family.n} * kFnvPrime));

    uint64_t record_count = r.u64();
    for (uint64_t i = 0; i < record_count; ++i) {
        ManuscriptRecord rec;
        rec.id = r.str();
        rec.journal_id = r.str();
        rec.title = r.str();
        rec.abstract = r.str();
        rec.submitted_at = Date{r.i32()};
        uint8_t has_decided = r.u8();
        int32_t decided_days = r.i32();
        if (has_decided) rec.decided_at = Date{decided_days};
        rec.decision = static_cast<Decision>(r.u8());
        uint8_t has_transfer = r.u8();
        std::string transfer = r.str();
        if (has_transfer) rec.transferred_from = std::move(transfer);
        snapshot.corpus.add(std::move(rec));
    }

    snapshot.shingles.resize(record_count);
    for (uint64_t i = 0; i < record_count; ++i) {
        auto& set = snapshot.shingles[i];
        set.manuscript_id = snapshot.corpus.at(i).id;
        set.too_short = r.u8() != 0;
        set.token_count = r.u32();
        set.shingles.resize(r.u32());
        for (auto& v : set.shingles) v = r.u64();
    }

    uint32_t bands = r.u32();
    uint32_t rows = r.u32();
    uint64_t sig_count = r.u64();
    std::vector<MinHashSignature> signatures(sig_count);
    for (auto& sig : signatures) {
        sig.manuscript_id = r.str();
        sig.family_tag = r.u64();
        sig.values.resize(static_cast<size_t>(bands) * rows);
        for (auto& v : sig.values) v = r.u64();
    }
    std::vector<LshIndex::BandTable> tables(bands);
    for (auto& table : tables) {
        uint32_t buckets = r.u32();
        table.reserve(buckets);
        for (uint32_t i = 0; i < buckets; ++i) {
            uint64_t key = r.u64();
            LshIndex::Bucket bucket(r.u32());
            for (auto& pos : bucket) {
                pos = r.u32();
                if (pos >= sig_count) throw SnapshotError("bucket position out of range");
            }
            table.emplace(key, std::move(bucket));
        }
    }
    snapshot.index = LshIndex::from_parts(bands, rows, std::move(signatures), std::move(tables));
    if (r.remaining() != 0) throw SnapshotError("trailing bytes after snapshot payload");
    return snapshot;
}

inline void save_snapshot(const Snapshot& snapshot, const std::string& path) {
    std::string bytes = serialize_snapshot(snapshot);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError("cannot open snapshot file for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw SnapshotError("failed writing snapshot: " + path);
}

inline Snapshot load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError("cannot open snapshot file: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_snapshot(std::move(bytes));
}

} // namespace dupescan
