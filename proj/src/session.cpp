#include "mindle/session.hpp"

#include <algorithm>
#include <chrono>

namespace mindle {

std::string_view to_string(SessionMode mode) {
    switch (mode) {
    case SessionMode::typing: return "typing";
    case SessionMode::options: return "options";
    case SessionMode::both: return "both";
    }
    return "unknown";
}

std::string_view to_string(Outcome outcome) {
    switch (outcome) {
    case Outcome::open: return "open";
    case Outcome::solved: return "solved";
    case Outcome::quit: return "quit";
    }
    return "unknown";
}

std::string_view to_string(GuessSource source) {
    switch (source) {
    case GuessSource::start: return "start";
    case GuessSource::typed: return "typed";
    case GuessSource::option_similar: return "option:similar";
    case GuessSource::option_related: return "option:related";
    case GuessSource::option_unrelated: return "option:unrelated";
    }
    return "unknown";
}

std::optional<SessionMode> parse_session_mode(std::string_view text) {
    if (text == "typing") return SessionMode::typing;
    if (text == "options") return SessionMode::options;
    if (text == "both") return SessionMode::both;
    return std::nullopt;
}

std::optional<Outcome> parse_outcome(std::string_view text) {
    if (text == "open") return Outcome::open;
    if (text == "solved") return Outcome::solved;
    if (text == "quit") return Outcome::quit;
    return std::nullopt;
}

std::optional<GuessSource> parse_guess_source(std::string_view text) {
    for (auto s : {GuessSource::start, GuessSource::typed, GuessSource::option_similar, GuessSource::option_related,
                   GuessSource::option_unrelated}) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

GuessSource option_source(ActionType type) {
    switch (type) {
    case ActionType::similar: return GuessSource::option_similar;
    case ActionType::related: return GuessSource::option_related;
    case ActionType::unrelated: return GuessSource::option_unrelated;
    }
    return GuessSource::typed;
}

std::optional<ActionType> option_type(GuessSource source) {
    switch (source) {
    case GuessSource::option_similar: return ActionType::similar;
    case GuessSource::option_related: return ActionType::related;
    case GuessSource::option_unrelated: return ActionType::unrelated;
    default: return std::nullopt;
    }
}

std::int64_t system_clock_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

GameSession::GameSession(std::shared_ptr<const Engine> engine, Challenge challenge, SessionMode mode,
                         std::string session_id, Clock clock)
    : engine_(std::move(engine)), clock_(std::move(clock)) {
    if (!engine_) throw std::invalid_argument("session requires an engine");
    const auto& lex = engine_->lexicon;
    if (!lex.contains(challenge.start) || !lex.contains(challenge.target)) {
        throw InvalidChallengeError("challenge words are not in the vocabulary");
    }
    if (challenge.start == challenge.target) throw InvalidChallengeError("challenge start equals target");

    trajectory_.session_id = std::move(session_id);
    trajectory_.mode = mode;
    trajectory_.challenge = std::move(challenge);

    const ConceptId start = trajectory_.challenge.start;
    trajectory_.records.push_back(GuessRecord{0, lex.word(start), start,
                                              lex.score(start, trajectory_.challenge.target).value(), now_(),
                                              GuessSource::start});
}

std::int64_t GameSession::now_() {
    last_ms_ = std::max(last_ms_, clock_());
    return last_ms_;
}

void GameSession::require_open() const {
    if (!is_open()) throw SessionClosedError("session " + trajectory_.session_id + " is closed");
}

GuessResult GameSession::guess_(std::string_view word, GuessSource source) {
    const auto& lex = engine_->lexicon;
    const auto id = lex.lookup(word);
    if (!id) {
        trajectory_.oov_attempts.push_back(OovAttempt{next_step(), to_lower(word), now_()});
        return OutOfVocabulary{to_lower(word)};
    }

    const double score = lex.score(*id, target()).value();
    const std::size_t step = next_step();
    const std::int64_t ts = now_();
    trajectory_.records.push_back(GuessRecord{step, lex.word(*id), *id, score, ts, source});
    cached_options_.reset();

    const bool hit = *id == target();
    if (hit) {
        trajectory_.outcome = Outcome::solved;
        trajectory_.closed_ms = ts;
    }
    return GuessOutcome{score, hit, step};
}

GuessResult GameSession::submit_guess(std::string_view word) {
    require_open();
    if (trajectory_.mode == SessionMode::options) {
        throw ModeViolationError("session " + trajectory_.session_id + " accepts option selections only");
    }
    return guess_(word, GuessSource::typed);
}

GuessResult GameSession::select_option(std::string_view word) {
    const auto& set = options();
    const auto id = engine_->lexicon.lookup(word);
    // Not an attempt the player could have made from the list, so it is not logged.
    if (!id) return OutOfVocabulary{std::string(word)};
    const auto type = set.type_of(*id);
    if (!type) throw InvalidOptionError("'" + std::string(word) + "' is not in the current option list");
    return guess_(word, option_source(*type));
}

const ProposalSet& GameSession::options() {
    require_open();
    if (trajectory_.mode == SessionMode::typing) {
        throw ModeViolationError("session " + trajectory_.session_id + " is in typing mode");
    }
    if (!cached_options_) cached_options_ = propose(engine_->lexicon, engine_->graph, current(), engine_->proposals);
    return *cached_options_;
}

Trajectory GameSession::quit() {
    require_open();
    trajectory_.outcome = Outcome::quit;
    trajectory_.closed_ms = now_();
    cached_options_.reset();
    return trajectory_;
}

GameSession start_session(std::shared_ptr<const Engine> engine, const Challenge& challenge, SessionMode mode,
                          std::string session_id, Clock clock) {
    return GameSession(std::move(engine), challenge, mode, std::move(session_id), std::move(clock));
}

bool replay_matches(const Trajectory& trajectory, std::shared_ptr<const Engine> engine) {
    if (trajectory.records.empty()) return false;
    GameSession replay(std::move(engine), trajectory.challenge, SessionMode::both, trajectory.session_id,
                       [] { return std::int64_t{0}; });
    if (replay.trajectory().records.front().score != trajectory.records.front().score) return false;
    for (std::size_t i = 1; i < trajectory.records.size(); ++i) {
        if (!replay.is_open()) return false;
        const auto result = replay.submit_guess(trajectory.records[i].word);
        const auto* outcome = std::get_if<GuessOutcome>(&result);
        if (!outcome || outcome->score != trajectory.records[i].score || outcome->step != trajectory.records[i].step) {
            return false;
        }
    }
    return (replay.trajectory().outcome == Outcome::solved) == (trajectory.outcome == Outcome::solved);
}

}  // namespace mindle
