#include "mindle/trajectory_store.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

namespace mindle {

namespace {

constexpr int kLogVersion = 1;

std::string sid_hint(const std::string& line) {
    const std::string key = "\"sid\":\"";
    const auto pos = line.find(key);
    if (pos == std::string::npos) return "unknown";
    const auto end = line.find('"', pos + key.size());
    if (end == std::string::npos) return line.substr(pos + key.size());
    return line.substr(pos + key.size(), end - pos - key.size());
}

}  // namespace

CorruptLogError::CorruptLogError(std::string source, std::size_t line, std::string sid, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + " (sid " + sid + "): " + what),
      source_(std::move(source)),
      line_(line),
      sid_(std::move(sid)) {}

nlohmann::ordered_json event_line(const Trajectory& trajectory, std::size_t t, const std::optional<std::string>& word,
                                  std::optional<double> score, std::int64_t ts, const std::optional<std::string>& src,
                                  std::string_view event) {
    nlohmann::ordered_json j;
    j["v"] = kLogVersion;
    j["sid"] = trajectory.session_id;
    j["cid"] = trajectory.challenge.id;
    j["t"] = t;
    j["word"] = word ? nlohmann::ordered_json(*word) : nlohmann::ordered_json(nullptr);
    j["score"] = score ? nlohmann::ordered_json(*score) : nlohmann::ordered_json(nullptr);
    j["ts"] = ts;
    j["src"] = src ? nlohmann::ordered_json(*src) : nlohmann::ordered_json(nullptr);
    j["event"] = event;
    return j;
}

std::vector<std::string> trajectory_log_lines(const Trajectory& trajectory, const Lexicon& lexicon,
                                              const std::string& config_hash) {
    std::vector<std::string> lines;

    nlohmann::ordered_json header;
    header["v"] = kLogVersion;
    header["event"] = "session";
    header["sid"] = trajectory.session_id;
    header["cid"] = trajectory.challenge.id;
    header["challenge"] = challenge_to_json(trajectory.challenge, lexicon);
    header["mode"] = to_string(trajectory.mode);
    header["config"] = config_hash;
    if (trajectory.mask_hint) {
        std::vector<std::string> words;
        for (ConceptId c : *trajectory.mask_hint) words.push_back(lexicon.word(c));
        header["mask"] = words;
    }
    lines.push_back(header.dump());

    auto oov = trajectory.oov_attempts.begin();
    auto flush_oov_before = [&](std::size_t step) {
        while (oov != trajectory.oov_attempts.end() && oov->step <= step) {
            lines.push_back(
                event_line(trajectory, oov->step, oov->word, std::nullopt, oov->timestamp_ms, "typed", "oov").dump());
            ++oov;
        }
    };

    for (std::size_t i = 0; i < trajectory.records.size(); ++i) {
        const auto& rec = trajectory.records[i];
        flush_oov_before(rec.step);
        const bool solving = trajectory.outcome == Outcome::solved && i + 1 == trajectory.records.size();
        lines.push_back(event_line(trajectory, rec.step, rec.word, rec.score, rec.timestamp_ms,
                                   std::string(to_string(rec.source)), solving ? "solve" : "guess")
                            .dump());
    }
    flush_oov_before(std::numeric_limits<std::size_t>::max());

    if (trajectory.outcome == Outcome::quit) {
        const std::size_t last = trajectory.records.empty() ? 0 : trajectory.records.back().step;
        lines.push_back(event_line(trajectory, last, std::nullopt, std::nullopt, trajectory.closed_ms.value_or(0),
                                   std::nullopt, "quit")
                            .dump());
    }
    return lines;
}

std::vector<Trajectory> parse_log(std::istream& in, const Lexicon& lexicon, const std::string& source) {
    std::vector<Trajectory> out;
    std::map<std::string, std::size_t> index;
    std::map<std::string, std::size_t> header_line;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fail = [&](const std::string& sid, const std::string& what) -> CorruptLogError {
            return CorruptLogError(source, line_no, sid, what);
        };

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw fail(sid_hint(line), std::string("malformed record at byte ") + std::to_string(e.byte));
        }

        try {
            if (!j.is_object() || j.value("v", 0) != kLogVersion) throw fail(sid_hint(line), "unsupported record version");
            const std::string sid = j.at("sid").get<std::string>();
            const std::string event = j.at("event").get<std::string>();

            if (event == "session") {
                if (index.contains(sid)) throw fail(sid, "duplicate session header");
                Trajectory traj;
                traj.session_id = sid;
                traj.challenge = challenge_from_json(j.at("challenge"), lexicon);
                if (traj.challenge.id != j.at("cid").get<std::string>()) throw fail(sid, "challenge id mismatch");
                const auto mode = parse_session_mode(j.at("mode").get<std::string>());
                if (!mode) throw fail(sid, "unknown session mode");
                traj.mode = *mode;
                if (j.contains("mask")) {
                    std::vector<ConceptId> mask;
                    for (const auto& w : j["mask"]) {
                        auto id = lexicon.lookup(w.get<std::string>());
                        if (!id) throw fail(sid, "mask word not in vocabulary");
                        mask.push_back(*id);
                    }
                    traj.mask_hint = std::move(mask);
                }
                index.emplace(sid, out.size());
                header_line.emplace(sid, line_no);
                out.push_back(std::move(traj));
                continue;
            }

            auto it = index.find(sid);
            if (it == index.end()) throw fail(sid, "event before its session header");
            Trajectory& traj = out[it->second];
            if (traj.outcome != Outcome::open) throw fail(sid, "event after the session closed");
            if (j.at("cid").get<std::string>() != traj.challenge.id) throw fail(sid, "challenge id mismatch");

            const auto t = j.at("t").get<std::size_t>();
            const auto ts = j.at("ts").get<std::int64_t>();

            if (event == "guess" || event == "solve") {
                if (t != traj.records.size()) throw fail(sid, "step " + std::to_string(t) + " out of sequence");
                const auto word = j.at("word").get<std::string>();
                const auto cid = lexicon.lookup(word);
                if (!cid) throw fail(sid, "word '" + word + "' not in vocabulary");
                const auto src = parse_guess_source(j.at("src").get<std::string>());
                if (!src) throw fail(sid, "unknown source");
                traj.records.push_back(GuessRecord{t, word, *cid, j.at("score").get<double>(), ts, *src});
                if (event == "solve") {
                    if (*cid != traj.challenge.target) throw fail(sid, "solve event on a non-target word");
                    traj.outcome = Outcome::solved;
                    traj.closed_ms = ts;
                }
            } else if (event == "oov") {
                traj.oov_attempts.push_back(OovAttempt{t, j.at("word").get<std::string>(), ts});
            } else if (event == "quit") {
                if (traj.records.empty()) throw fail(sid, "quit before any guess");
                traj.outcome = Outcome::quit;
                traj.closed_ms = ts;
            } else {
                throw fail(sid, "unknown event '" + event + "'");
            }
        } catch (const CorruptLogError&) {
            throw;
        } catch (const std::exception& e) {
            throw fail(sid_hint(line), e.what());
        }
    }

    for (const auto& traj : out) {
        if (traj.records.empty()) {
            throw CorruptLogError(source, header_line[traj.session_id], traj.session_id, "session has no guesses");
        }
        if (traj.outcome == Outcome::open) {
            throw CorruptLogError(source, line_no, traj.session_id, "session block ends before the session closed");
        }
    }
    return out;
}

bool TrajectoryFilter::matches(const Trajectory& trajectory) const {
    if (!session_ids.empty() &&
        std::find(session_ids.begin(), session_ids.end(), trajectory.session_id) == session_ids.end()) {
        return false;
    }
    return !challenge_id || *challenge_id == trajectory.challenge.id;
}

TrajectoryStore::TrajectoryStore(std::filesystem::path directory, const Lexicon& lexicon, std::string config_hash,
                                 Clock clock)
    : directory_(std::move(directory)), lexicon_(lexicon), config_hash_(std::move(config_hash)), clock_(std::move(clock)) {
    std::error_code ec;
    std::filesystem::create_directories(directory_, ec);
    if (ec) throw PersistenceError("cannot create data directory " + directory_.string() + ": " + ec.message());
    for (const auto& traj : load()) persisted_.insert(traj.session_id);
}

std::filesystem::path TrajectoryStore::file_for(std::int64_t epoch_ms) const {
    const std::time_t secs = static_cast<std::time_t>(epoch_ms / 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char name[32];
    std::strftime(name, sizeof name, "mindle-%Y%m%d.log", &tm);
    return directory_ / name;
}

std::string TrajectoryStore::persist(const Trajectory& trajectory) {
    if (trajectory.outcome == Outcome::open) {
        throw OpenSessionError("session " + trajectory.session_id + " is still open");
    }
    std::string block;
    for (const auto& line : trajectory_log_lines(trajectory, lexicon_, config_hash_)) {
        block += line;
        block += '\n';
    }

    std::lock_guard lock(mutex_);
    if (persisted_.contains(trajectory.session_id)) {
        throw DuplicateSessionError("session " + trajectory.session_id + " was already persisted");
    }
    const auto path = file_for(clock_());
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) throw PersistenceError("cannot open " + path.string() + " for appending");
    out.write(block.data(), static_cast<std::streamsize>(block.size()));
    out.flush();
    if (!out) throw PersistenceError("write to " + path.string() + " failed");
    persisted_.insert(trajectory.session_id);
    return trajectory.session_id;
}

std::vector<std::filesystem::path> TrajectoryStore::log_files_() const {
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::exists(directory_)) return files;
    for (const auto& entry : std::filesystem::directory_iterator(directory_)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.starts_with("mindle-") && name.ends_with(".log")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<Trajectory> TrajectoryStore::load(const TrajectoryFilter& filter) const {
    std::lock_guard lock(mutex_);
    std::vector<Trajectory> out;
    for (const auto& file : log_files_()) {
        for (auto& traj : load_log_path(file, lexicon_, filter)) out.push_back(std::move(traj));
    }
    return out;
}

std::vector<Trajectory> load_log_path(const std::filesystem::path& path, const Lexicon& lexicon,
                                      const TrajectoryFilter& filter) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(path)) {
        for (const auto& entry : std::filesystem::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".log") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(path);
    }

    std::vector<Trajectory> out;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw PersistenceError("cannot read " + file.string());
        for (auto& traj : parse_log(in, lexicon, file.string())) {
            if (filter.matches(traj)) out.push_back(std::move(traj));
        }
    }
    return out;
}

}  // namespace mindle
