#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mindle/engine.hpp"
#include "mindle/session.hpp"

namespace mindle {

/// Scores r_0..r_n of a trajectory, r_0 being the start word.
std::vector<double> reward_series(const Trajectory& trajectory);

/// delta_r(t) = r_{t+1} - r_t. Empty for fewer than two rewards.
std::vector<double> reward_deltas(std::span<const double> rewards);

enum class ActionSpace { full, masked, three_types };
enum class RateVariant { literal, best_counterfactual };

std::string_view to_string(ActionSpace space);
std::optional<ActionSpace> parse_action_space(std::string_view text);

struct AnalysisConfig {
    double gamma = 1.0;
    double eureka_threshold = 20.0;
    ActionSpace space = ActionSpace::full;
    RateVariant variant = RateVariant::literal;
    // Used when space == masked and the trajectory carries no mask hint.
    std::vector<ConceptId> mask;

    void validate() const;
};

struct EurekaReport {
    std::vector<double> delta_r;
    std::vector<double> delta_a;
    std::vector<std::size_t> eureka_steps;
    // Per transition; std::nullopt where the rate is undefined.
    std::vector<std::optional<double>> rates_literal;
    std::vector<std::optional<double>> rates_best;
};

/// delta_a(t) = r(t:j) - r(i:t) around each step, where i is the nearest
/// earlier step whose delta_r is at least delta_r(t) (else 0) and j the
/// nearest later one (else the final index). r(a:b) averages r_{a+1}..r_b;
/// the empty window r(0:0) is taken as r_0. Steps with delta_a >= threshold
/// are flagged.
EurekaReport eureka_profile(std::span<const double> rewards, double eureka_threshold);

/// min{0, 1 - min_reward / actual}; std::nullopt when actual == 0.
std::optional<double> literal_updating_rate(double min_reward, double actual_reward);
/// max{0, 1 - actual / max_reward}; std::nullopt when actual == 0.
std::optional<double> best_counterfactual_rate(double max_reward, double actual_reward);

/// Rewards R(s_t, a, .) of every action in the chosen space at step t.
std::vector<double> counterfactual_rewards(const Trajectory& trajectory, std::size_t t, ActionSpace space,
                                           const Engine& engine, std::span<const ConceptId> mask = {});

/// Updating rate for the transition from record t to record t + 1.
std::optional<double> updating_rate(const Trajectory& trajectory, std::size_t t, const AnalysisConfig& config,
                                    const Engine& engine, RateVariant variant);

enum class RunKind { local, jump };

struct ActionRun {
    RunKind kind = RunKind::local;
    std::size_t first = 0;  // index into the label list
    std::size_t length = 0;

    bool operator==(const ActionRun&) const = default;
};

struct ActionLabels {
    std::vector<ActionType> labels;
    std::vector<ActionRun> runs;
};

ActionLabels label_actions(const Trajectory& trajectory, const Lexicon& lexicon, const ConceptGraph& graph,
                           const ClassifyThresholds& thresholds = {});

/// sum_t gamma^t * transition_rewards[t].
double discounted_return(std::span<const double> transition_rewards, double gamma);

enum class PolicyKind { greedy_similar, local_global_switch, gradient_walk };
enum class JumpSource { unrelated_proposals, random_word };

struct PolicySpec {
    PolicyKind kind = PolicyKind::greedy_similar;
    std::size_t patience = 3;
    JumpSource jump_source = JumpSource::unrelated_proposals;
    std::optional<ConceptId> direction;

    void validate(const Lexicon& lexicon) const;
};

/// Scripted player. Closes with `quit` when stuck or when `max_steps` guesses
/// pass without a hit.
Trajectory simulate_policy(const PolicySpec& policy, const Challenge& challenge, std::shared_ptr<const Engine> engine,
                           std::size_t max_steps, std::uint64_t seed);

/// Concepts guessed at least `min_count` times across the trajectories, by id.
std::vector<ConceptId> derive_mask(std::span<const Trajectory> trajectories, std::size_t min_count);

/// Eureka profile plus updating rates when an engine is available.
EurekaReport analyze_trajectory(const Trajectory& trajectory, const AnalysisConfig& config,
                                const Engine* engine = nullptr);

nlohmann::ordered_json report_to_json(const EurekaReport& report, RateVariant primary = RateVariant::literal);

}  // namespace mindle
