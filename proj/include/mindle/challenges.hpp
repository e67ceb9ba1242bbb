#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mindle/concept_graph.hpp"
#include "mindle/lexicon.hpp"

namespace mindle {

/// Bounds on start -> target navigation statistics.
struct Difficulty {
    std::size_t min_len = 1;
    std::size_t max_len = 2;
    std::uint64_t min_paths = 1;

    void validate() const;
    bool operator==(const Difficulty&) const = default;

    static Difficulty easy() { return {1, 2, 1}; }
    static Difficulty medium() { return {2, 4, 2}; }
    static Difficulty hard() { return {4, 6, 2}; }
    /// "easy", "medium", "hard" or "min_len,max_len,min_paths".
    static Difficulty parse(std::string_view text);
};

class UnknownTopicError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleDifficultyError : public std::runtime_error {
public:
    InfeasibleDifficultyError(std::string constraint, const std::string& what)
        : std::runtime_error(what), constraint_(std::move(constraint)) {}

    /// "shortest_path", "path_count", "topic" or "graph".
    const std::string& constraint() const noexcept { return constraint_; }

private:
    std::string constraint_;
};

struct TopicOptions {
    double threshold = 0.35;
    std::size_t max_members = 500;
};

/// Concepts whose cosine to the topic vector is at least `threshold`, best
/// first, capped at `max_members`. Multi-word topics average the vectors of
/// their in-vocabulary words; the topic words themselves are not members.
std::vector<ConceptId> topic_members(const Lexicon& lexicon, std::string_view topic,
                                     const TopicOptions& options = {});

struct Challenge {
    std::string id;
    ConceptId target;
    ConceptId start;
    std::optional<std::string> topic;
    Difficulty difficulty;
    std::uint64_t seed = 0;

    bool operator==(const Challenge&) const = default;
};

struct ChallengeOptions {
    std::optional<std::string> topic;
    TopicOptions topic_options;
    std::size_t max_attempts = 10000;
};

/// Seeded rejection sampling of (start, target) pairs until the navigation
/// statistics fit `difficulty`.
Challenge generate_challenge(const NavigationGraph& nav, const Lexicon& lexicon, const Difficulty& difficulty,
                             std::uint64_t seed, const ChallengeOptions& options = {});

/// Operator/log payload: includes the target word.
nlohmann::ordered_json challenge_to_json(const Challenge& challenge, const Lexicon& lexicon);
/// Player payload: never includes the target.
nlohmann::ordered_json challenge_to_player_json(const Challenge& challenge, const Lexicon& lexicon);
Challenge challenge_from_json(const nlohmann::json& j, const Lexicon& lexicon);

}  // namespace mindle
