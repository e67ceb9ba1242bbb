#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fixture.hpp"
#include "mindle/lexicon.hpp"
#include "oracles.hpp"

using namespace mindle;
using namespace mindle::testing;

namespace {

// Brute-force ranking used as an oracle: exact integer comparison of every
// other concept, stable over ascending ids.
std::vector<ConceptId> oracle_top(const Lexicon& lex, ConceptId c, std::size_t k, const std::vector<ConceptId>& exclude) {
    const auto vecs = integer_vectors(lex);
    std::vector<ConceptId> all;
    for (std::uint32_t i = 0; i < lex.size(); ++i) {
        if (i == c.index || std::find(exclude.begin(), exclude.end(), ConceptId{i}) != exclude.end()) continue;
        all.push_back(ConceptId{i});
    }
    std::stable_sort(all.begin(), all.end(), [&](ConceptId x, ConceptId y) {
        return oracle_compare_cos(vecs[c.index], vecs[x.index], vecs[y.index]) > 0;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

}  // namespace

TEST_CASE("load_lexicon reads the fixture in input order") {
    const Lexicon lex = fixture_lexicon();
    CHECK(lex.size() == 5);
    CHECK(lex.dim() == 2);
    CHECK(lex.word(kCat) == "cat");
    CHECK(lex.word(kPiano) == "piano");
}

TEST_CASE("load_lexicon truncates at the limit") {
    std::istringstream in(kFixtureVectors);
    const Lexicon lex = load_lexicon(in, 3);
    REQUIRE(lex.size() == 3);
    CHECK(lex.word(ConceptId{2}) == "tiger");
    CHECK_FALSE(lex.lookup("car"));
}

TEST_CASE("load_lexicon rejects inconsistent dimensions with the line number") {
    std::istringstream in("dog 0.8 0.6\ncat 1.0\n");
    try {
        (void)load_lexicon(in, 10);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("load_lexicon rejects non-numeric components") {
    std::istringstream in("dog 0.8 0.6\ncat 1.0 abc\n");
    CHECK_THROWS_AS((void)load_lexicon(in, 10), ParseError);
}

TEST_CASE("load_lexicon signals an empty source") {
    std::istringstream empty("");
    CHECK_THROWS_AS((void)load_lexicon(empty, 10), EmptyLexiconError);
    std::istringstream header_only("0 300\n");
    CHECK_THROWS_AS((void)load_lexicon(header_only, 10), EmptyLexiconError);
}

TEST_CASE("load_lexicon skips a count/dim header, folds case and drops duplicates") {
    std::istringstream in("3 2\nCat 1 0\ncat 0 1\nDog 0.8 0.6 \r\n\nzero 0 0\n");
    const Lexicon lex = load_lexicon(in, 10);
    REQUIRE(lex.size() == 2);
    CHECK(lex.word(ConceptId{0}) == "cat");
    CHECK(lex.vector(ConceptId{0})[0] == 1.0);
    CHECK(lex.word(ConceptId{1}) == "dog");
}

TEST_CASE("load_lexicon is deterministic") {
    std::mt19937_64 rng(5);
    std::ostringstream text;
    for (int i = 0; i < 50; ++i) {
        text << "w" << i;
        for (int d = 0; d < 4; ++d) text << ' ' << std::uniform_real_distribution<double>(-1, 1)(rng);
        text << '\n';
    }
    std::istringstream a(text.str()), b(text.str());
    const Lexicon x = load_lexicon(a, 30);
    const Lexicon y = load_lexicon(b, 30);
    REQUIRE(x.size() == y.size());
    for (std::uint32_t i = 0; i < x.size(); ++i) {
        CHECK(x.word(ConceptId{i}) == y.word(ConceptId{i}));
        CHECK(std::equal(x.vector(ConceptId{i}).begin(), x.vector(ConceptId{i}).end(), y.vector(ConceptId{i}).begin()));
    }
}

TEST_CASE("lookup is case-insensitive and reports absent words") {
    const Lexicon lex = fixture_lexicon();
    CHECK(lex.lookup("cat") == kCat);
    CHECK(lex.lookup("CAT") == kCat);
    CHECK_FALSE(lex.lookup("xylograph"));
}

TEST_CASE("similarity is the cosine of the fixture vectors") {
    const Lexicon lex = fixture_lexicon();
    CHECK(lex.similarity(kCat, kCat) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lex.similarity(kCat, kDog) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(lex.similarity(kCat, kPiano) == doctest::Approx(-0.6).epsilon(1e-12));
}

TEST_CASE("score clamps negatives and reserves 100 for the target") {
    const Lexicon lex = fixture_lexicon();
    CHECK(lex.score(kCat, kCat).value() == 100.0);
    CHECK(lex.score(kCat, kPiano).value() == 0.0);
    CHECK(lex.score(kDog, kCat).value() == doctest::Approx(80.0).epsilon(1e-12));

    const double c = 0.809938;
    const Lexicon planted = Lexicon::from_entries({{"cat", {1.0, 0.0}}, {"cats", {c, std::sqrt(1 - c * c)}}});
    CHECK(planted.score(ConceptId{1}, ConceptId{0}).value() == doctest::Approx(80.9938).epsilon(1e-9));

    const Lexicon twins = Lexicon::from_entries({{"a", {1.0, 2.0}}, {"b", {2.0, 4.0}}});
    CHECK(twins.score(ConceptId{0}, ConceptId{1}).value() < 100.0);
    CHECK(twins.score(ConceptId{0}, ConceptId{1}).value() == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("top_similar on the fixture") {
    const Lexicon lex = fixture_lexicon();
    const auto top2 = lex.top_similar(kCat, 2);
    REQUIRE(top2.size() == 2);
    CHECK(top2[0].first == kTiger);
    CHECK(top2[0].second == doctest::Approx(0.96));
    CHECK(top2[1].first == kDog);
    CHECK(top2[1].second == doctest::Approx(0.8));

    CHECK(lex.top_similar(kCat, 10).size() == 4);

    const std::vector<ConceptId> exclude{kTiger};
    const auto excl = lex.top_similar(kCat, 2, exclude);
    REQUIRE(excl.size() == 2);
    CHECK(excl[0].first == kDog);
    CHECK(excl[1].first == kCar);
    CHECK(excl[1].second == doctest::Approx(0.0));
}

TEST_CASE("least_similar ranks from the bottom") {
    const Lexicon lex = fixture_lexicon();
    const auto low = lex.least_similar(kCat, 2);
    REQUIRE(low.size() == 2);
    CHECK(low[0].first == kPiano);
    CHECK(low[1].first == kCar);
}

TEST_CASE("similarity is symmetric and bounded on random lexicons") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 20; ++round) {
        const Lexicon lex = random_lexicon(rng, 40, 3);
        for (std::uint32_t a = 0; a < lex.size(); ++a) {
            for (std::uint32_t b = 0; b < lex.size(); ++b) {
                const double s = lex.similarity(ConceptId{a}, ConceptId{b});
                CHECK(std::abs(s - lex.similarity(ConceptId{b}, ConceptId{a})) <= 1e-9);
                CHECK(std::abs(s) <= 1.0 + 1e-9);
                const double score = lex.score(ConceptId{a}, ConceptId{b}).value();
                CHECK(score >= 0.0);
                CHECK(score <= 100.0);
                CHECK((score == 100.0) == (a == b));
            }
        }
    }
}

TEST_CASE("top_similar matches an exhaustive sort including ties") {
    std::mt19937_64 rng(23);
    for (int round = 0; round < 25; ++round) {
        const Lexicon lex = random_lexicon(rng, 60, 2);
        const ConceptId c{static_cast<std::uint32_t>(rng() % lex.size())};
        const std::size_t k = 1 + rng() % 70;
        std::vector<ConceptId> exclude;
        for (int e = 0; e < 3; ++e) exclude.push_back(ConceptId{static_cast<std::uint32_t>(rng() % lex.size())});
        const auto got = lex.top_similar(c, k, exclude);
        const auto want = oracle_top(lex, c, k, exclude);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].first == want[i]);
            CHECK(got[i].second == doctest::Approx(lex.similarity(c, want[i])).epsilon(1e-12));
        }
    }
}
