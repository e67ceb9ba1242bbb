#include <doctest.h>

#include <random>

#include "fixture.hpp"
#include "mindle/analysis.hpp"
#include "oracles.hpp"

using namespace mindle;
using namespace mindle::testing;

namespace {

Challenge fixture_challenge(ConceptId start, ConceptId target) {
    return Challenge{"ch-test", target, start, std::nullopt, Difficulty::easy(), 0};
}

Trajectory play(const std::shared_ptr<const Engine>& engine, ConceptId start, ConceptId target,
                const std::vector<std::string>& words) {
    std::int64_t now = 0;
    auto s = start_session(engine, fixture_challenge(start, target), SessionMode::typing, "s", [&] { return now += 10; });
    for (const auto& w : words)
        if (s.is_open()) (void)s.submit_guess(w);
    if (s.is_open()) (void)s.quit();
    return s.trajectory();
}

}  // namespace

TEST_CASE("reward_deltas") {
    const std::vector<double> r{10, 12, 40, 45, 50};
    CHECK(reward_deltas(r) == std::vector<double>{2, 28, 5, 5});
    const std::vector<double> flat{7, 7, 7};
    CHECK(reward_deltas(flat) == std::vector<double>{0, 0});
    const std::vector<double> jump{0, 100};
    CHECK(reward_deltas(jump) == std::vector<double>{100});
    const std::vector<double> one{5};
    CHECK(reward_deltas(one).empty());
}

TEST_CASE("eureka_profile worked case") {
    const std::vector<double> r{10, 12, 40, 45, 50};
    const EurekaReport rep = eureka_profile(r, 20);
    REQUIRE(rep.delta_a.size() == 4);
    CHECK(rep.delta_a[1] == doctest::Approx(33.0));
    for (std::size_t t = 0; t < 4; ++t) CHECK(rep.delta_a[t] == doctest::Approx(oracle_delta_a(r, t)));
    CHECK(std::find(rep.eureka_steps.begin(), rep.eureka_steps.end(), 1u) != rep.eureka_steps.end());
    for (auto s : rep.eureka_steps) CHECK(rep.delta_a[s] >= 20.0);
}

TEST_CASE("eureka_profile on a flat series") {
    const std::vector<double> r(6, 42.0);
    const EurekaReport rep = eureka_profile(r, 20);
    CHECK(rep.delta_a == std::vector<double>(5, 0.0));
    CHECK(rep.eureka_steps.empty());
}

TEST_CASE("eureka_profile matches direct evaluation on every short grid series") {
    const double grid[] = {0, 25, 50, 75, 100};
    for (std::size_t len = 2; len <= 6; ++len) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < len; ++i) total *= 5;
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<double> r(len);
            std::size_t c = code;
            for (auto& x : r) {
                x = grid[c % 5];
                c /= 5;
            }
            const EurekaReport rep = eureka_profile(r, 30);
            REQUIRE(rep.delta_r.size() == len - 1);
            REQUIRE(rep.delta_a.size() == len - 1);
            for (std::size_t t = 0; t + 1 < len; ++t) {
                const double want = oracle_delta_a(r, t);
                if (std::abs(rep.delta_a[t] - want) > 1e-9) FAIL_CHECK("series code " << code << " step " << t);
                const bool flagged =
                    std::find(rep.eureka_steps.begin(), rep.eureka_steps.end(), t) != rep.eureka_steps.end();
                if (flagged != (want >= 30)) FAIL_CHECK("flag mismatch at code " << code << " step " << t);
            }
        }
    }
}

TEST_CASE("updating rate hand cases") {
    CHECK(literal_updating_rate(50, 50) == 0.0);
    CHECK(literal_updating_rate(20, 50) == 0.0);
    CHECK(literal_updating_rate(80, 50) == doctest::Approx(-0.6));
    CHECK(best_counterfactual_rate(80, 50) == 0.375);
    CHECK(best_counterfactual_rate(40, 50) == 0.0);
    CHECK(best_counterfactual_rate(0, 50) == 0.0);
    CHECK_FALSE(literal_updating_rate(20, 0));
    CHECK_FALSE(best_counterfactual_rate(80, 0));
}

TEST_CASE("counterfactual spaces") {
    const auto engine = fixture_engine(1);
    const Trajectory t = play(engine, kCar, kCat, {"dog", "tiger"});
    const auto full = counterfactual_rewards(t, 0, ActionSpace::full, *engine);
    CHECK(full.size() == 5);
    const std::vector<ConceptId> mask{kDog, kPiano};
    const auto masked = counterfactual_rewards(t, 0, ActionSpace::masked, *engine, mask);
    REQUIRE(masked.size() == 2);
    CHECK(masked[0] == doctest::Approx(80.0));
    CHECK(masked[1] == 0.0);
    // From car with K=1: similar piano, no related (car is isolated), unrelated cat.
    const auto types = counterfactual_rewards(t, 0, ActionSpace::three_types, *engine);
    REQUIRE(types.size() == 2);
    CHECK(types[0] == 0.0);
    CHECK(types[1] == 100.0);
}

TEST_CASE("updating rates on a fixture trajectory") {
    const auto engine = fixture_engine(1);
    const Trajectory t = play(engine, kCar, kCat, {"dog", "tiger"});
    AnalysisConfig cfg;
    // Step 0 -> 1 earns 80; the best action in the full space is cat (100).
    CHECK(updating_rate(t, 0, cfg, *engine, RateVariant::literal) == 0.0);
    CHECK(updating_rate(t, 0, cfg, *engine, RateVariant::best_counterfactual) == doctest::Approx(0.2));
    const Trajectory start_only = play(engine, kCat, kPiano, {"car"});
    // cos(car, piano) = 0.8, reached with a zero-score start; step 0 -> 1 earns 80.
    CHECK(updating_rate(start_only, 0, cfg, *engine, RateVariant::literal) == 0.0);
}

TEST_CASE("literal rates are never positive and best-counterfactual rates stay in [0, 1]") {
    std::mt19937_64 rng(109);
    const std::size_t n = 50;
    const auto engine = Engine::make(random_lexicon(rng, n, 3), random_graph(rng, n, 0.06), ProposalConfig{3});
    for (ActionSpace space : {ActionSpace::full, ActionSpace::masked, ActionSpace::three_types}) {
        for (int round = 0; round < 15; ++round) {
            const ConceptId start{static_cast<std::uint32_t>(rng() % n)};
            const ConceptId target{static_cast<std::uint32_t>((start.index + 1 + rng() % (n - 1)) % n)};
            std::vector<std::string> words;
            for (int w = 0; w < 8; ++w) words.push_back(engine->lexicon.word(ConceptId{static_cast<std::uint32_t>(rng() % n)}));
            Trajectory t = play(engine, start, target, words);
            AnalysisConfig cfg;
            cfg.space = space;
            // The masked space covers every guessed concept so the taken action is always inside it.
            for (const auto& r : t.records) cfg.mask.push_back(r.concept_id);
            const EurekaReport rep = analyze_trajectory(t, cfg, engine.get());
            REQUIRE(rep.rates_literal.size() == t.records.size() - 1);
            for (std::size_t i = 0; i < rep.rates_literal.size(); ++i) {
                if (rep.rates_literal[i] && space != ActionSpace::three_types) CHECK(*rep.rates_literal[i] <= 0.0);
                if (rep.rates_best[i]) {
                    CHECK(*rep.rates_best[i] >= 0.0);
                    CHECK(*rep.rates_best[i] <= 1.0);
                }
                CHECK(rep.rates_literal[i].has_value() == (t.records[i + 1].score != 0.0));
            }
        }
    }
}

TEST_CASE("label_actions on the fixture") {
    const auto engine = fixture_engine(1);
    const ClassifyThresholds strict{0.95, 0.8};
    const Trajectory t = play(engine, kCat, kCar, {"tiger", "dog", "piano"});
    const ActionLabels labels = label_actions(t, engine->lexicon, engine->graph, strict);
    CHECK(labels.labels == std::vector<ActionType>{ActionType::similar, ActionType::related, ActionType::unrelated});
    CHECK(labels.runs == std::vector<ActionRun>{{RunKind::local, 0, 2}, {RunKind::jump, 2, 1}});

    const Trajectory single = play(engine, kCat, kCar, {});
    CHECK(label_actions(single, engine->lexicon, engine->graph).labels.empty());
    CHECK(label_actions(single, engine->lexicon, engine->graph).runs.empty());

    const Trajectory synonyms = play(engine, kCat, kCar, {"tiger", "dog", "dog"});
    const ActionLabels syn = label_actions(synonyms, engine->lexicon, engine->graph, ClassifyThresholds{0.5, 0.8});
    CHECK(syn.labels == std::vector<ActionType>(3, ActionType::similar));
    CHECK(syn.runs == std::vector<ActionRun>{{RunKind::local, 0, 3}});
}

TEST_CASE("labels ignore timestamps") {
    const auto engine = fixture_engine(1);
    Trajectory t = play(engine, kCat, kCar, {"tiger", "dog", "piano"});
    const auto before = label_actions(t, engine->lexicon, engine->graph).labels;
    for (auto& r : t.records) r.timestamp_ms *= 7;
    CHECK(label_actions(t, engine->lexicon, engine->graph).labels == before);
    CHECK(before.size() == t.records.size() - 1);
}

TEST_CASE("discounted_return") {
    const std::vector<double> r{10, 20};
    CHECK(discounted_return(r, 1.0) == 30.0);
    CHECK(discounted_return(r, 0.5) == 20.0);
    CHECK(discounted_return({}, 0.9) == 0.0);
    CHECK_THROWS_AS((void)discounted_return(r, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)discounted_return(r, 1.5), std::invalid_argument);
}

TEST_CASE("derive_mask counts guesses across trajectories") {
    const auto engine = fixture_engine(1);
    const std::vector<Trajectory> one{play(engine, kCar, kPiano, {"dog", "cat"})};
    CHECK(derive_mask(one, 1) == std::vector<ConceptId>{kCat, kDog, kCar});
    CHECK(derive_mask(one, 2).empty());
    const std::vector<Trajectory> two{play(engine, kCar, kPiano, {"dog"}), play(engine, kTiger, kPiano, {"dog"})};
    CHECK(derive_mask(two, 2) == std::vector<ConceptId>{kDog});
}

TEST_CASE("greedy-similar solves the fixture") {
    const auto engine = fixture_engine(2);
    const Trajectory t = simulate_policy(PolicySpec{}, fixture_challenge(kDog, kCat), engine, 10, 1);
    CHECK(t.outcome == Outcome::solved);
    CHECK(t.records.size() - 1 <= 2);
    CHECK(replay_matches(t, engine));
}

TEST_CASE("simulation stops at the step cap") {
    const auto engine = fixture_engine(1);
    const Trajectory t = simulate_policy(PolicySpec{}, fixture_challenge(kPiano, kCat), engine, 1, 1);
    CHECK(t.outcome == Outcome::quit);
    CHECK(t.records.size() == 2);
}

TEST_CASE("simulations are deterministic and keep session invariants") {
    std::mt19937_64 rng(113);
    const std::size_t n = 80;
    const auto engine = Engine::make(random_lexicon(rng, n, 3), random_graph(rng, n, 0.05), ProposalConfig{3});
    for (PolicyKind kind : {PolicyKind::greedy_similar, PolicyKind::local_global_switch, PolicyKind::gradient_walk}) {
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            PolicySpec spec;
            spec.kind = kind;
            spec.patience = 2;
            if (kind == PolicyKind::gradient_walk) spec.direction = ConceptId{static_cast<std::uint32_t>(seed)};
            const ConceptId start{static_cast<std::uint32_t>(10 + seed)};
            const ConceptId target{static_cast<std::uint32_t>(40 + seed)};
            const Challenge ch{"ch", target, start, std::nullopt, Difficulty::easy(), seed};
            const Trajectory a = simulate_policy(spec, ch, engine, 30, seed);
            const Trajectory b = simulate_policy(spec, ch, engine, 30, seed);
            CHECK(a == b);
            CHECK(a.outcome != Outcome::open);
            CHECK(a.records.size() <= 31);
            for (std::size_t i = 0; i < a.records.size(); ++i) {
                CHECK(a.records[i].step == i);
                if (i > 0) CHECK(a.records[i].timestamp_ms >= a.records[i - 1].timestamp_ms);
            }
            CHECK(replay_matches(a, engine));
        }
    }
}

TEST_CASE("local-global-switch jumps once patience runs out") {
    const auto engine = fixture_engine(1);
    PolicySpec spec;
    spec.kind = PolicyKind::local_global_switch;
    spec.patience = 1;
    bool jumped = false;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Trajectory t = simulate_policy(spec, fixture_challenge(kPiano, kTiger), engine, 6, seed);
        for (const auto label : label_actions(t, engine->lexicon, engine->graph).labels)
            jumped |= label == ActionType::unrelated;
        for (const auto& r : t.records) jumped |= r.source == GuessSource::option_unrelated;
    }
    CHECK(jumped);
}

TEST_CASE("policy validation") {
    const Lexicon lex = fixture_lexicon();
    PolicySpec gradient;
    gradient.kind = PolicyKind::gradient_walk;
    CHECK_THROWS_AS(gradient.validate(lex), std::invalid_argument);
    gradient.direction = kCar;
    CHECK_NOTHROW(gradient.validate(lex));
    PolicySpec sw;
    sw.kind = PolicyKind::local_global_switch;
    sw.patience = 0;
    CHECK_THROWS_AS(sw.validate(lex), std::invalid_argument);
}

TEST_CASE("report JSON layout") {
    const std::vector<double> r{10, 12, 40, 45, 50};
    EurekaReport rep = eureka_profile(r, 20);
    rep.rates_literal = {0.0, std::nullopt, 0.0, 0.0};
    rep.rates_best = {0.5, std::nullopt, 0.25, 0.0};
    const auto j = report_to_json(rep, RateVariant::best_counterfactual);
    CHECK(j.at("delta_r").size() == 4);
    CHECK(j.at("rates").at(0) == 0.5);
    CHECK(j.at("rates").at(1).is_null());
    CHECK(j.at("rates_variant") == "best-counterfactual");
    CHECK(j.at("eureka_steps").at(0) == 1);
}
