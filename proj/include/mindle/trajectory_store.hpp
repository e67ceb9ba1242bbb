#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mindle/session.hpp"

namespace mindle {

class PersistenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OpenSessionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class DuplicateSessionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class CorruptLogError : public std::runtime_error {
public:
    CorruptLogError(std::string source, std::size_t line, std::string sid, const std::string& what);

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& sid() const noexcept { return sid_; }

private:
    std::string source_;
    std::size_t line_;
    std::string sid_;
};

/// {v, sid, cid, t, word, score, ts, src, event} for one session event.
nlohmann::ordered_json event_line(const Trajectory& trajectory, std::size_t t, const std::optional<std::string>& word,
                                  std::optional<double> score, std::int64_t ts, const std::optional<std::string>& src,
                                  std::string_view event);

/// Session header followed by every event of the trajectory, one JSON object
/// per line, no trailing newline on the elements.
std::vector<std::string> trajectory_log_lines(const Trajectory& trajectory, const Lexicon& lexicon,
                                              const std::string& config_hash);

/// Parses newline-delimited session logs back into trajectories, in order of
/// first appearance. `source` names the stream in error messages.
std::vector<Trajectory> parse_log(std::istream& in, const Lexicon& lexicon, const std::string& source = "<log>");

struct TrajectoryFilter {
    std::vector<std::string> session_ids;
    std::optional<std::string> challenge_id;

    bool matches(const Trajectory& trajectory) const;
};

/// Append-only store: one file per UTC day, "mindle-YYYYMMDD.log".
class TrajectoryStore {
public:
    TrajectoryStore(std::filesystem::path directory, const Lexicon& lexicon, std::string config_hash = "",
                    Clock clock = system_clock_ms);

    /// Writes the header and all events of a closed trajectory in one append,
    /// flushed before returning. Returns the session id.
    std::string persist(const Trajectory& trajectory);
    std::vector<Trajectory> load(const TrajectoryFilter& filter = {}) const;

    const std::filesystem::path& directory() const noexcept { return directory_; }
    std::filesystem::path file_for(std::int64_t epoch_ms) const;

private:
    std::vector<std::filesystem::path> log_files_() const;

    std::filesystem::path directory_;
    const Lexicon& lexicon_;
    std::string config_hash_;
    Clock clock_;
    mutable std::mutex mutex_;
    std::set<std::string> persisted_;
};

/// Loads trajectories from a single log file or every log in a directory.
std::vector<Trajectory> load_log_path(const std::filesystem::path& path, const Lexicon& lexicon,
                                      const TrajectoryFilter& filter = {});

}  // namespace mindle
