#include "mindle/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <unordered_set>

namespace mindle {

std::vector<double> reward_series(const Trajectory& trajectory) {
    std::vector<double> r;
    r.reserve(trajectory.records.size());
    for (const auto& rec : trajectory.records) r.push_back(rec.score);
    return r;
}

std::vector<double> reward_deltas(std::span<const double> rewards) {
    std::vector<double> d;
    for (std::size_t t = 0; t + 1 < rewards.size(); ++t) d.push_back(rewards[t + 1] - rewards[t]);
    return d;
}

std::string_view to_string(ActionSpace space) {
    switch (space) {
    case ActionSpace::full: return "full";
    case ActionSpace::masked: return "masked";
    case ActionSpace::three_types: return "three-types";
    }
    return "unknown";
}

std::optional<ActionSpace> parse_action_space(std::string_view text) {
    if (text == "full") return ActionSpace::full;
    if (text == "masked") return ActionSpace::masked;
    if (text == "three-types") return ActionSpace::three_types;
    return std::nullopt;
}

void AnalysisConfig::validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0, 1]");
    if (!(eureka_threshold >= 0.0)) throw std::invalid_argument("eureka threshold must be >= 0");
}

EurekaReport eureka_profile(std::span<const double> rewards, double eureka_threshold) {
    EurekaReport report;
    report.delta_r = reward_deltas(rewards);
    const auto& dr = report.delta_r;
    const std::size_t last = rewards.empty() ? 0 : rewards.size() - 1;

    auto window_mean = [&](std::size_t from, std::size_t to) {
        if (to == from) return rewards[to];
        double sum = 0.0;
        for (std::size_t k = from + 1; k <= to; ++k) sum += rewards[k];
        return sum / static_cast<double>(to - from);
    };

    for (std::size_t t = 0; t < dr.size(); ++t) {
        std::size_t i = 0;
        for (std::size_t k = t; k-- > 0;) {
            if (dr[k] >= dr[t]) {
                i = k;
                break;
            }
        }
        std::size_t j = last;
        for (std::size_t k = t + 1; k < dr.size(); ++k) {
            if (dr[k] >= dr[t]) {
                j = k;
                break;
            }
        }
        const double delta_a = window_mean(t, j) - window_mean(i, t);
        report.delta_a.push_back(delta_a);
        if (delta_a >= eureka_threshold) report.eureka_steps.push_back(t);
    }
    return report;
}

std::optional<double> literal_updating_rate(double min_reward, double actual_reward) {
    if (actual_reward == 0.0) return std::nullopt;
    return std::min(0.0, 1.0 - min_reward / actual_reward);
}

std::optional<double> best_counterfactual_rate(double max_reward, double actual_reward) {
    if (actual_reward == 0.0) return std::nullopt;
    if (max_reward <= 0.0) return 0.0;
    return std::clamp(1.0 - actual_reward / max_reward, 0.0, 1.0);
}

std::vector<double> counterfactual_rewards(const Trajectory& trajectory, std::size_t t, ActionSpace space,
                                           const Engine& engine, std::span<const ConceptId> mask) {
    if (t + 1 >= trajectory.records.size()) throw std::out_of_range("no transition at this step");
    const auto& lex = engine.lexicon;
    const ConceptId target = trajectory.challenge.target;
    std::vector<double> rewards;

    switch (space) {
    case ActionSpace::full:
        rewards.reserve(lex.size());
        for (std::uint32_t i = 0; i < lex.size(); ++i) rewards.push_back(lex.score(ConceptId{i}, target).value());
        break;
    case ActionSpace::masked: {
        std::span<const ConceptId> m = mask;
        if (m.empty() && trajectory.mask_hint) m = *trajectory.mask_hint;
        if (m.empty()) throw std::invalid_argument("masked action space requires a non-empty mask");
        for (ConceptId c : m) rewards.push_back(lex.score(c, target).value());
        break;
    }
    case ActionSpace::three_types: {
        const auto set = propose(lex, engine.graph, trajectory.records[t].concept_id, engine.proposals);
        for (const auto* list : {&set.similar, &set.related, &set.unrelated}) {
            if (!list->empty()) rewards.push_back(lex.score(list->front(), target).value());
        }
        break;
    }
    }
    return rewards;
}

std::optional<double> updating_rate(const Trajectory& trajectory, std::size_t t, const AnalysisConfig& config,
                                    const Engine& engine, RateVariant variant) {
    const auto rewards = counterfactual_rewards(trajectory, t, config.space, engine, config.mask);
    const double actual = trajectory.records[t + 1].score;
    if (rewards.empty()) return std::nullopt;
    if (variant == RateVariant::literal) {
        return literal_updating_rate(*std::min_element(rewards.begin(), rewards.end()), actual);
    }
    return best_counterfactual_rate(*std::max_element(rewards.begin(), rewards.end()), actual);
}

ActionLabels label_actions(const Trajectory& trajectory, const Lexicon& lexicon, const ConceptGraph& graph,
                           const ClassifyThresholds& thresholds) {
    ActionLabels out;
    for (std::size_t t = 0; t + 1 < trajectory.records.size(); ++t) {
        const ConceptId from = trajectory.records[t].concept_id;
        const ConceptId to = trajectory.records[t + 1].concept_id;
        // A repeated guess stays in place, which counts as local search.
        const ActionType type =
            from == to ? ActionType::similar : classify_transition(lexicon, graph, from, to, thresholds);
        out.labels.push_back(type);

        const RunKind kind = type == ActionType::unrelated ? RunKind::jump : RunKind::local;
        if (!out.runs.empty() && out.runs.back().kind == kind) {
            ++out.runs.back().length;
        } else {
            out.runs.push_back(ActionRun{kind, out.labels.size() - 1, 1});
        }
    }
    return out;
}

double discounted_return(std::span<const double> transition_rewards, double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in (0, 1]");
    double total = 0.0;
    double discount = 1.0;
    for (double r : transition_rewards) {
        total += discount * r;
        discount *= gamma;
    }
    return total;
}

void PolicySpec::validate(const Lexicon& lexicon) const {
    if (kind == PolicyKind::local_global_switch && patience == 0) {
        throw std::invalid_argument("local-global-switch patience must be at least 1");
    }
    if (kind == PolicyKind::gradient_walk && (!direction || !lexicon.contains(*direction))) {
        throw std::invalid_argument("gradient-walk needs a direction concept in the vocabulary");
    }
}

namespace {

struct Candidate {
    ConceptId concept_id;
    ActionType type;
};

std::vector<Candidate> unvisited(const ProposalSet& set, std::initializer_list<ActionType> types,
                                 const std::unordered_set<ConceptId>& visited) {
    std::vector<Candidate> out;
    for (ActionType type : types) {
        const auto& list = type == ActionType::similar   ? set.similar
                           : type == ActionType::related ? set.related
                                                         : set.unrelated;
        for (ConceptId c : list) {
            if (!visited.contains(c)) out.push_back({c, type});
        }
    }
    return out;
}

template <typename Key>
std::optional<Candidate> best_by(const std::vector<Candidate>& candidates, Key key) {
    std::optional<Candidate> best;
    double best_key = 0.0;
    for (const auto& c : candidates) {
        const double k = key(c.concept_id);
        if (!best || k > best_key) {
            best = c;
            best_key = k;
        }
    }
    return best;
}

}  // namespace

Trajectory simulate_policy(const PolicySpec& policy, const Challenge& challenge, std::shared_ptr<const Engine> engine,
                           std::size_t max_steps, std::uint64_t seed) {
    if (max_steps == 0) throw std::invalid_argument("max_steps must be at least 1");
    if (!engine) throw std::invalid_argument("simulate_policy requires an engine");
    policy.validate(engine->lexicon);

    char sid[32];
    std::snprintf(sid, sizeof sid, "sim-%016llx", static_cast<unsigned long long>(seed));
    std::int64_t tick = 0;
    GameSession session(engine, challenge, SessionMode::both, sid, [&tick] { return 1000 * tick++; });

    const auto& lex = engine->lexicon;
    const ConceptId target = challenge.target;
    std::mt19937_64 rng(seed);
    std::unordered_set<ConceptId> visited{challenge.start};
    double best_score = session.trajectory().records.front().score;
    std::size_t non_improving = 0;

    auto by_score = [&](ConceptId c) { return lex.score(c, target).value(); };

    for (std::size_t step = 0; step < max_steps && session.is_open(); ++step) {
        const ProposalSet& set = session.options();
        std::optional<Candidate> choice;
        std::optional<ConceptId> typed;

        switch (policy.kind) {
        case PolicyKind::greedy_similar:
            choice = best_by(unvisited(set, {ActionType::similar}, visited), by_score);
            break;
        case PolicyKind::gradient_walk: {
            const ConceptId direction = *policy.direction;
            choice = best_by(unvisited(set, {ActionType::similar, ActionType::related, ActionType::unrelated}, visited),
                             [&](ConceptId c) { return lex.similarity(c, direction); });
            break;
        }
        case PolicyKind::local_global_switch: {
            auto local = unvisited(set, {ActionType::similar, ActionType::related}, visited);
            if (non_improving < policy.patience && !local.empty()) {
                choice = best_by(local, by_score);
                break;
            }
            non_improving = 0;
            if (policy.jump_source == JumpSource::unrelated_proposals) {
                auto jumps = unvisited(set, {ActionType::unrelated}, visited);
                if (!jumps.empty()) choice = jumps[rng() % jumps.size()];
            } else if (visited.size() < lex.size()) {
                ConceptId pick{static_cast<std::uint32_t>(rng() % lex.size())};
                while (visited.contains(pick)) pick = ConceptId{(pick.index + 1) % static_cast<std::uint32_t>(lex.size())};
                typed = pick;
            }
            break;
        }
        }

        if (!choice && !typed) break;
        const GuessResult result =
            typed ? session.submit_guess(lex.word(*typed)) : session.select_option(lex.word(choice->concept_id));
        const auto& outcome = std::get<GuessOutcome>(result);
        visited.insert(typed ? *typed : choice->concept_id);
        if (outcome.score > best_score) {
            best_score = outcome.score;
            non_improving = 0;
        } else {
            ++non_improving;
        }
    }

    if (session.is_open()) return session.quit();
    return session.trajectory();
}

std::vector<ConceptId> derive_mask(std::span<const Trajectory> trajectories, std::size_t min_count) {
    if (trajectories.empty()) throw std::invalid_argument("derive_mask needs at least one trajectory");
    if (min_count == 0) throw std::invalid_argument("min_count must be at least 1");
    std::map<ConceptId, std::size_t> counts;
    for (const auto& traj : trajectories) {
        for (const auto& rec : traj.records) ++counts[rec.concept_id];
    }
    std::vector<ConceptId> mask;
    for (const auto& [c, n] : counts) {
        if (n >= min_count) mask.push_back(c);
    }
    return mask;
}

EurekaReport analyze_trajectory(const Trajectory& trajectory, const AnalysisConfig& config, const Engine* engine) {
    config.validate();
    EurekaReport report = eureka_profile(reward_series(trajectory), config.eureka_threshold);
    if (!engine) return report;
    for (std::size_t t = 0; t + 1 < trajectory.records.size(); ++t) {
        report.rates_literal.push_back(updating_rate(trajectory, t, config, *engine, RateVariant::literal));
        report.rates_best.push_back(updating_rate(trajectory, t, config, *engine, RateVariant::best_counterfactual));
    }
    return report;
}

nlohmann::ordered_json report_to_json(const EurekaReport& report, RateVariant primary) {
    auto rates_json = [](const std::vector<std::optional<double>>& rates) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : rates) arr.push_back(r ? nlohmann::ordered_json(*r) : nlohmann::ordered_json(nullptr));
        return arr;
    };
    nlohmann::ordered_json j;
    j["delta_r"] = report.delta_r;
    j["delta_a"] = report.delta_a;
    j["eureka_steps"] = report.eureka_steps;
    j["rates"] = rates_json(primary == RateVariant::literal ? report.rates_literal : report.rates_best);
    j["rates_variant"] = primary == RateVariant::literal ? "literal" : "best-counterfactual";
    j["rates_literal"] = rates_json(report.rates_literal);
    j["rates_best_counterfactual"] = rates_json(report.rates_best);
    return j;
}

}  // namespace mindle
