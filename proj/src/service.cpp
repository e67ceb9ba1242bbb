#include "mindle/service.hpp"

#include <cstdio>
#include <iostream>
#include <random>

#include <httplib.h>

namespace mindle {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

ApiResponse error(int status, std::string code, std::string detail = {}) {
    nlohmann::ordered_json body;
    body["error"] = std::move(code);
    if (!detail.empty()) body["detail"] = std::move(detail);
    return {status, std::move(body)};
}

// Players see whether a guess came from the option list, never its type.
std::string_view player_source(GuessSource source) {
    return option_type(source) ? "option" : to_string(source);
}

Difficulty difficulty_from(const nlohmann::json& value, const ServerConfig& config) {
    if (value.is_string()) {
        const auto name = value.get<std::string>();
        auto it = config.difficulty_presets.find(name);
        if (it != config.difficulty_presets.end()) return it->second;
        return Difficulty::parse(name);
    }
    const nlohmann::json& spec = value.contains("custom") ? value.at("custom") : value;
    Difficulty d{spec.at("min_len").get<std::size_t>(), spec.at("max_len").get<std::size_t>(),
                 spec.at("min_paths").get<std::uint64_t>()};
    d.validate();
    return d;
}

}  // namespace

GameService::GameService(std::shared_ptr<const Engine> engine, ServerConfig config,
                         std::shared_ptr<TrajectoryStore> store, Clock clock)
    : engine_(std::move(engine)), config_(std::move(config)), store_(std::move(store)), clock_(std::move(clock)) {
    if (!engine_) throw std::invalid_argument("GameService requires an engine");
}

std::uint64_t GameService::next_seed_() { return splitmix64(config_.seed + counter_.fetch_add(1)); }

std::shared_ptr<GameService::Slot> GameService::find_(const std::string& session_id) const {
    std::shared_lock lock(registry_mutex_);
    auto it = sessions_.find(session_id);
    return it == sessions_.end() ? nullptr : it->second;
}

void GameService::persist_if_closed_(Slot& slot) {
    if (slot.persisted || slot.session.is_open() || !store_) return;
    store_->persist(slot.session.trajectory());
    slot.persisted = true;
}

ApiResponse GameService::create_challenge(const nlohmann::json& body) {
    Difficulty difficulty = Difficulty::easy();
    ChallengeOptions options;
    options.topic_options = config_.topic_options();
    options.max_attempts = config_.max_attempts;
    std::uint64_t seed = 0;
    try {
        if (!body.is_object()) return error(400, "bad_request", "body must be an object");
        if (body.contains("difficulty")) difficulty = difficulty_from(body["difficulty"], config_);
        if (body.contains("topic") && !body["topic"].is_null()) options.topic = body["topic"].get<std::string>();
        seed = body.contains("seed") ? body["seed"].get<std::uint64_t>() : next_seed_();
    } catch (const std::exception& e) {
        return error(400, "bad_request", e.what());
    }

    try {
        Challenge challenge = generate_challenge(engine_->navigation, engine_->lexicon, difficulty, seed, options);
        auto payload = challenge_to_player_json(challenge, engine_->lexicon);
        std::unique_lock lock(registry_mutex_);
        challenges_.insert_or_assign(challenge.id, std::move(challenge));
        return {201, std::move(payload)};
    } catch (const UnknownTopicError& e) {
        return error(422, "unknown_topic", e.what());
    } catch (const InfeasibleDifficultyError& e) {
        auto r = error(422, "infeasible", e.what());
        r.body["constraint"] = e.constraint();
        return r;
    }
}

ApiResponse GameService::create_session(const nlohmann::json& body) {
    std::string challenge_id;
    SessionMode mode = SessionMode::both;
    try {
        if (!body.is_object()) return error(400, "bad_request", "body must be an object");
        challenge_id = body.at("challenge_id").get<std::string>();
        if (body.contains("mode")) {
            auto parsed = parse_session_mode(body["mode"].get<std::string>());
            if (!parsed) return error(400, "bad_request", "mode must be typing, options or both");
            mode = *parsed;
        }
    } catch (const std::exception& e) {
        return error(400, "bad_request", e.what());
    }

    Challenge challenge;
    {
        std::shared_lock lock(registry_mutex_);
        auto it = challenges_.find(challenge_id);
        if (it == challenges_.end()) return error(404, "unknown_challenge");
        challenge = it->second;
    }

    const std::uint64_t seed = next_seed_();
    char sid[24];
    std::snprintf(sid, sizeof sid, "s-%016llx", static_cast<unsigned long long>(seed));
    auto slot = std::make_shared<Slot>(start_session(engine_, challenge, mode, sid, clock_), seed);

    nlohmann::ordered_json payload;
    payload["session_id"] = sid;
    payload["start_word"] = engine_->lexicon.word(challenge.start);
    payload["start_score"] = slot->session.trajectory().records.front().score;
    if (challenge.topic) payload["topic_hint"] = *challenge.topic;

    std::unique_lock lock(registry_mutex_);
    sessions_.emplace(sid, std::move(slot));
    return {201, std::move(payload)};
}

ApiResponse GameService::submit_guess(const std::string& session_id, const nlohmann::json& body) {
    auto slot = find_(session_id);
    if (!slot) return error(404, "unknown_session");

    std::string word;
    std::optional<std::string> source;
    try {
        if (!body.is_object()) return error(400, "bad_request", "body must be an object");
        word = body.at("word").get<std::string>();
        if (body.contains("source")) source = body["source"].get<std::string>();
    } catch (const std::exception& e) {
        return error(400, "bad_request", e.what());
    }
    if (source && *source != "typed" && *source != "option") return error(400, "bad_request", "unknown source");

    std::lock_guard lock(slot->mutex);
    auto& session = slot->session;
    if (!session.is_open()) return error(409, "closed");

    const bool as_option = source ? *source == "option" : session.trajectory().mode == SessionMode::options;
    GuessResult result;
    try {
        result = as_option ? session.select_option(word) : session.submit_guess(word);
    } catch (const ModeViolationError& e) {
        return error(400, "mode", e.what());
    } catch (const InvalidOptionError& e) {
        return error(400, "not_an_option", e.what());
    }

    if (std::holds_alternative<OutOfVocabulary>(result)) return error(422, "oov");
    const auto& outcome = std::get<GuessOutcome>(result);
    try {
        persist_if_closed_(*slot);
    } catch (const std::exception& e) {
        return error(500, "persistence", e.what());
    }

    nlohmann::ordered_json payload;
    payload["score"] = outcome.score;
    payload["hit"] = outcome.hit;
    payload["step"] = outcome.step;
    return {200, std::move(payload)};
}

ApiResponse GameService::session_history(const std::string& session_id) {
    auto slot = find_(session_id);
    if (!slot) return error(404, "unknown_session");
    std::lock_guard lock(slot->mutex);
    const auto& traj = slot->session.trajectory();

    nlohmann::ordered_json payload;
    payload["session_id"] = traj.session_id;
    payload["status"] = to_string(traj.outcome);
    payload["mode"] = to_string(traj.mode);
    payload["start_word"] = engine_->lexicon.word(traj.challenge.start);
    if (traj.challenge.topic) payload["topic_hint"] = *traj.challenge.topic;
    nlohmann::ordered_json history = nlohmann::ordered_json::array();
    for (const auto& rec : traj.records) {
        history.push_back({{"step", rec.step}, {"word", rec.word}, {"score", rec.score},
                           {"source", player_source(rec.source)}});
    }
    payload["history"] = std::move(history);
    if (traj.outcome != Outcome::open) payload["target_word"] = engine_->lexicon.word(traj.challenge.target);
    return {200, std::move(payload)};
}

ApiResponse GameService::session_options(const std::string& session_id) {
    auto slot = find_(session_id);
    if (!slot) return error(404, "unknown_session");
    std::lock_guard lock(slot->mutex);
    auto& session = slot->session;
    if (!session.is_open()) return error(409, "closed");

    std::vector<std::string> words;
    try {
        const ProposalSet& set = session.options();
        for (const auto* list : {&set.similar, &set.related, &set.unrelated}) {
            for (ConceptId c : *list) words.push_back(engine_->lexicon.word(c));
        }
    } catch (const ModeViolationError& e) {
        return error(400, "mode", e.what());
    }

    // Fisher-Yates with an explicit generator keeps the order stable across platforms.
    std::mt19937_64 rng(splitmix64(slot->seed ^ session.next_step()));
    for (std::size_t i = words.size(); i > 1; --i) std::swap(words[i - 1], words[rng() % i]);

    nlohmann::ordered_json payload;
    payload["step"] = session.next_step() - 1;
    payload["options"] = words;
    return {200, std::move(payload)};
}

ApiResponse GameService::quit_session(const std::string& session_id) {
    auto slot = find_(session_id);
    if (!slot) return error(404, "unknown_session");
    std::lock_guard lock(slot->mutex);
    if (!slot->session.is_open()) return error(409, "closed");
    const Trajectory traj = slot->session.quit();
    try {
        persist_if_closed_(*slot);
    } catch (const std::exception& e) {
        return error(500, "persistence", e.what());
    }
    nlohmann::ordered_json payload;
    payload["outcome"] = to_string(traj.outcome);
    payload["reveal"] = engine_->lexicon.word(traj.challenge.target);
    return {200, std::move(payload)};
}

ApiResponse GameService::session_analysis(const std::string& session_id) {
    auto slot = find_(session_id);
    if (!slot) return error(404, "unknown_session");
    Trajectory traj;
    {
        std::lock_guard lock(slot->mutex);
        if (slot->session.is_open()) return error(409, "open");
        traj = slot->session.trajectory();
    }
    AnalysisConfig cfg;
    cfg.eureka_threshold = config_.theta_eureka;
    auto payload = report_to_json(analyze_trajectory(traj, cfg, engine_.get()));
    payload["session_id"] = traj.session_id;
    return {200, std::move(payload)};
}

HttpServer::HttpServer(std::shared_ptr<GameService> service)
    : service_(std::move(service)), server_(std::make_unique<httplib::Server>()) {
    auto reply = [](httplib::Response& res, const ApiResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    auto with_body = [reply](auto handler) {
        return [reply, handler](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body;
            try {
                body = req.body.empty() ? nlohmann::json::object() : nlohmann::json::parse(req.body);
            } catch (const nlohmann::json::parse_error&) {
                reply(res, error(400, "bad_json"));
                return;
            }
            reply(res, handler(req, body));
        };
    };
    auto svc = service_;

    server_->Post("/api/challenges", with_body([svc](const httplib::Request&, const nlohmann::json& body) {
                      return svc->create_challenge(body);
                  }));
    server_->Post("/api/sessions", with_body([svc](const httplib::Request&, const nlohmann::json& body) {
                      return svc->create_session(body);
                  }));
    server_->Post(R"(/api/sessions/([^/]+)/guesses)",
                  with_body([svc](const httplib::Request& req, const nlohmann::json& body) {
                      return svc->submit_guess(req.matches[1], body);
                  }));
    server_->Post(R"(/api/sessions/([^/]+)/quit)", [svc, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc->quit_session(req.matches[1]));
    });
    server_->Get(R"(/api/sessions/([^/]+)/options)", [svc, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc->session_options(req.matches[1]));
    });
    server_->Get(R"(/api/sessions/([^/]+))", [svc, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc->session_history(req.matches[1]));
    });
    server_->Get(R"(/api/analysis/sessions/([^/]+))",
                 [svc, reply](const httplib::Request& req, httplib::Response& res) {
                     reply(res, svc->session_analysis(req.matches[1]));
                 });

    server_->set_exception_handler([reply](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "unknown error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        std::cerr << "mindle: request failed: " << what << '\n';
        reply(res, error(500, "internal"));
    });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen(const std::string& host, int port) { return server_->listen(host, port); }

int HttpServer::bind_any(const std::string& host) { return server_->bind_to_any_port(host); }

bool HttpServer::listen_after_bind() { return server_->listen_after_bind(); }

void HttpServer::stop() {
    if (server_ && server_->is_running()) server_->stop();
}

bool HttpServer::is_running() const { return server_->is_running(); }

std::shared_ptr<const Engine> load_engine(const ServerConfig& config) {
    Lexicon lexicon = load_lexicon_file(config.embeddings_path, config.vocab_limit);
    ConceptGraph graph = load_graph_file(config.graph_path, lexicon);
    return Engine::make(std::move(lexicon), std::move(graph), config.proposal_config(), config.classify_thresholds());
}

}  // namespace mindle
