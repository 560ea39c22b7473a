#include <catch2/catch_amalgamated.hpp>

#include "dupescan/text.hpp"

using dupescan::normalize;

TEST_CASE("normalize lowercases, strips punctuation, collapses whitespace") {
    CHECK(normalize("The Quick  Brown FOX.") ==
          std::vector<std::string>{"the", "quick", "brown", "fox"});
}

TEST_CASE("normalize of empty input is empty") {
    CHECK(normalize("").empty());
    CHECK(normalize("  \t\n ").empty());
    CHECK(normalize("...!?").empty());
}

TEST_CASE("normalize treats dashes as punctuation and keeps accents") {
    // em dash between the words; both accented words survive intact
    CHECK(normalize("état—réduit") == std::vector<std::string>{"état", "réduit"});
    CHECK(normalize("foo-bar") == std::vector<std::string>{"foo", "bar"});
}

TEST_CASE("normalize lowercases Latin-1 and Extended-A letters") {
    CHECK(normalize("ÉTAT Straße Ćwik") == std::vector<std::string>{"état", "straße", "ćwik"});
}

TEST_CASE("normalize composes combining accents") {
    // "e" + U+0301 combining acute == precomposed é
    CHECK(normalize("e\xcc\x81tat") == normalize("état"));
}

TEST_CASE("normalize folds compatibility forms") {
    CHECK(normalize("ＦＵＬＬｗｉｄｔｈ") == std::vector<std::string>{"fullwidth"});
    CHECK(normalize("e\xef\xac\x83"
                    "cient") == std::vector<std::string>{"efficient"}); // ﬃ ligature
    CHECK(normalize("a\xc2\xa0"
                    "b") == std::vector<std::string>{"a", "b"}); // NBSP separates
}

TEST_CASE("normalize keeps digits and splits on symbols") {
    CHECK(normalize("CO2 + H2O → products") ==
          std::vector<std::string>{"co2", "h2o", "products"});
}

TEST_CASE("normalize is deterministic") {
    std::string text = "Some — Mixed… Text with état and ＦＷ forms, 42 numbers";
    CHECK(normalize(text) == normalize(text));
}

TEST_CASE("normalize survives invalid UTF-8") {
    std::string bad = "abc\xff\xfe def";
    auto tokens = normalize(bad);
    REQUIRE(tokens.size() == 2);
    CHECK(tokens[0] == "abc");
    CHECK(tokens[1] == "def");
}
