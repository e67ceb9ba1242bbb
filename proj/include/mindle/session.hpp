#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mindle/challenges.hpp"
#include "mindle/engine.hpp"
#include "mindle/proposals.hpp"

namespace mindle {

enum class SessionMode { typing, options, both };
enum class Outcome { open, solved, quit };
enum class GuessSource { start, typed, option_similar, option_related, option_unrelated };

std::string_view to_string(SessionMode mode);
std::string_view to_string(Outcome outcome);
std::string_view to_string(GuessSource source);
std::optional<SessionMode> parse_session_mode(std::string_view text);
std::optional<Outcome> parse_outcome(std::string_view text);
std::optional<GuessSource> parse_guess_source(std::string_view text);
GuessSource option_source(ActionType type);
std::optional<ActionType> option_type(GuessSource source);

struct GuessRecord {
    std::size_t step = 0;
    std::string word;
    ConceptId concept_id;
    double score = 0.0;
    std::int64_t timestamp_ms = 0;
    GuessSource source = GuessSource::typed;

    bool operator==(const GuessRecord&) const = default;
};

/// Out-of-vocabulary attempt. Kept beside the trajectory, never as a step.
struct OovAttempt {
    std::size_t step = 0;  // step index the attempt would have taken
    std::string word;
    std::int64_t timestamp_ms = 0;

    bool operator==(const OovAttempt&) const = default;
};

struct Trajectory {
    std::string session_id;
    Challenge challenge;
    SessionMode mode = SessionMode::typing;
    std::vector<GuessRecord> records;
    std::vector<OovAttempt> oov_attempts;
    Outcome outcome = Outcome::open;
    std::optional<std::int64_t> closed_ms;
    std::optional<std::vector<ConceptId>> mask_hint;

    bool operator==(const Trajectory&) const = default;
};

struct GuessOutcome {
    double score = 0.0;
    bool hit = false;
    std::size_t step = 0;
};

struct OutOfVocabulary {
    std::string word;
};

using GuessResult = std::variant<GuessOutcome, OutOfVocabulary>;

class SessionClosedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ModeViolationError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class InvalidChallengeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidOptionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Clock = std::function<std::int64_t()>;
std::int64_t system_clock_ms();

/// One player's run through a challenge. Not thread-safe: callers serialize
/// access per session.
class GameSession {
public:
    GameSession(std::shared_ptr<const Engine> engine, Challenge challenge, SessionMode mode, std::string session_id,
                Clock clock = system_clock_ms);

    GuessResult submit_guess(std::string_view word);
    /// Takes a word from the current option list; recorded with its option type.
    /// Unknown words yield OutOfVocabulary without a log entry.
    GuessResult select_option(std::string_view word);
    /// Proposals anchored at the latest guess. Stable until the next guess.
    const ProposalSet& options();
    Trajectory quit();

    bool is_open() const noexcept { return trajectory_.outcome == Outcome::open; }
    std::size_t next_step() const noexcept { return trajectory_.records.size(); }
    ConceptId current() const { return trajectory_.records.back().concept_id; }
    ConceptId target() const noexcept { return trajectory_.challenge.target; }
    const Trajectory& trajectory() const noexcept { return trajectory_; }
    const Engine& engine() const noexcept { return *engine_; }

private:
    void require_open() const;
    GuessResult guess_(std::string_view word, GuessSource source);
    std::int64_t now_();

    std::shared_ptr<const Engine> engine_;
    Clock clock_;
    Trajectory trajectory_;
    std::optional<ProposalSet> cached_options_;
    std::int64_t last_ms_ = 0;
};

GameSession start_session(std::shared_ptr<const Engine> engine, const Challenge& challenge, SessionMode mode,
                          std::string session_id, Clock clock = system_clock_ms);

/// Re-scores the trajectory's words in a fresh session; true when every
/// score and the outcome match.
bool replay_matches(const Trajectory& trajectory, std::shared_ptr<const Engine> engine);

}  // namespace mindle
