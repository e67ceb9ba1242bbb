#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "mindle/concept_graph.hpp"
#include "mindle/engine.hpp"
#include "mindle/lexicon.hpp"
#include "mindle/session.hpp"

namespace mindle::testing {

// Five unit vectors in the plane:
//   cat (1, 0)  dog (0.8, 0.6)  tiger (0.96, 0.28)  car (0, 1)  piano (-0.6, 0.8)
inline constexpr const char* kFixtureVectors =
    "cat 1.0 0.0\n"
    "dog 0.8 0.6\n"
    "tiger 0.96 0.28\n"
    "car 0.0 1.0\n"
    "piano -0.6 0.8\n";

inline constexpr ConceptId kCat{0};
inline constexpr ConceptId kDog{1};
inline constexpr ConceptId kTiger{2};
inline constexpr ConceptId kCar{3};
inline constexpr ConceptId kPiano{4};

inline Lexicon fixture_lexicon() {
    std::istringstream in(kFixtureVectors);
    return load_lexicon(in, 40000);
}

// cat -> dog (3), tiger -> dog (2); every other pair has weight zero.
inline ConceptGraph fixture_graph() {
    ConceptGraph g(5);
    g.add_weight(kCat, kDog, 3);
    g.add_weight(kTiger, kDog, 2);
    return g;
}

inline std::shared_ptr<const Engine> fixture_engine(std::size_t k = 1) {
    ProposalConfig p;
    p.k = k;
    return Engine::make(fixture_lexicon(), fixture_graph(), p);
}

/// Random lexicon with `n` words "w0".."w{n-1}" and small-integer components so
/// that exact cosine ties occur.
inline Lexicon random_lexicon(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
    std::uniform_int_distribution<int> comp(-3, 3);
    std::vector<std::pair<std::string, std::vector<double>>> entries;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(dim);
        do {
            for (auto& x : v) x = comp(rng);
        } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
        entries.emplace_back("w" + std::to_string(i), std::move(v));
    }
    return Lexicon::from_entries(std::move(entries));
}

/// Random sparse graph with integer weights (ties likely).
inline ConceptGraph random_graph(std::mt19937_64& rng, std::size_t n, double density, int max_weight = 5) {
    ConceptGraph g(n);
    std::bernoulli_distribution edge(density);
    std::uniform_int_distribution<int> weight(1, max_weight);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t k = 0; k < n; ++k) {
            if (i != k && edge(rng)) g.add_weight(ConceptId{i}, ConceptId{k}, weight(rng));
        }
    }
    return g;
}

/// Closed trajectory from random play: typed guesses, option picks, unknown
/// words, and either a solve or a quit. Timestamps tick from `t0`.
inline Trajectory random_closed_trajectory(std::mt19937_64& rng, const std::shared_ptr<const Engine>& engine,
                                           const std::string& sid, std::int64_t t0 = 1'700'000'000'000) {
    const auto n = static_cast<std::uint32_t>(engine->lexicon.size());
    const ConceptId start{static_cast<std::uint32_t>(rng() % n)};
    const ConceptId target{(start.index + 1 + static_cast<std::uint32_t>(rng() % (n - 1))) % n};
    std::optional<std::string> topic;
    if (rng() % 4 == 0) topic = engine->lexicon.word(target);
    const Challenge challenge{"ch-" + std::to_string(rng() % 1000), target, start, topic, Difficulty::easy(), rng()};
    const auto mode = static_cast<SessionMode>(rng() % 3);
    auto now = std::make_shared<std::int64_t>(t0);
    GameSession s(engine, challenge, mode, sid, [now, &rng] { return *now += static_cast<std::int64_t>(rng() % 5000); });
    const std::size_t steps = rng() % 12;
    for (std::size_t i = 0; i < steps && s.is_open(); ++i) {
        const bool pick = mode == SessionMode::options || (mode == SessionMode::both && rng() % 2 == 0);
        if (pick) {
            const auto& opts = s.options();
            std::vector<ConceptId> all = opts.similar;
            all.insert(all.end(), opts.related.begin(), opts.related.end());
            all.insert(all.end(), opts.unrelated.begin(), opts.unrelated.end());
            if (!all.empty()) (void)s.select_option(engine->lexicon.word(all[rng() % all.size()]));
        } else if (rng() % 6 == 0) {
            (void)s.submit_guess("zz-unknown-" + std::to_string(i));
        } else if (rng() % 8 == 0) {
            (void)s.submit_guess(engine->lexicon.word(target));
        } else {
            (void)s.submit_guess(engine->lexicon.word(ConceptId{static_cast<std::uint32_t>(rng() % n)}));
        }
    }
    if (s.is_open()) (void)s.quit();
    Trajectory t = s.trajectory();
    if (rng() % 3 == 0) t.mask_hint = std::vector<ConceptId>{start, target};
    return t;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("mindle-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace mindle::testing
