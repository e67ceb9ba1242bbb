#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include <json.hpp>

#include "mindle/analysis.hpp"
#include "mindle/config.hpp"
#include "mindle/engine.hpp"
#include "mindle/session.hpp"
#include "mindle/trajectory_store.hpp"

namespace httplib {
class Server;
}

namespace mindle {

struct ApiResponse {
    int status = 200;
    nlohmann::ordered_json body;
};

/// Transport-independent game API. Every method is safe to call from
/// concurrent request handlers; calls on the same session serialize.
class GameService {
public:
    GameService(std::shared_ptr<const Engine> engine, ServerConfig config, std::shared_ptr<TrajectoryStore> store,
                Clock clock = system_clock_ms);

    ApiResponse create_challenge(const nlohmann::json& body);
    ApiResponse create_session(const nlohmann::json& body);
    ApiResponse submit_guess(const std::string& session_id, const nlohmann::json& body);
    ApiResponse session_history(const std::string& session_id);
    ApiResponse session_options(const std::string& session_id);
    ApiResponse quit_session(const std::string& session_id);
    ApiResponse session_analysis(const std::string& session_id);

    const Engine& engine() const noexcept { return *engine_; }
    const ServerConfig& config() const noexcept { return config_; }

private:
    struct Slot {
        Slot(GameSession s, std::uint64_t sd) : session(std::move(s)), seed(sd) {}

        std::mutex mutex;
        GameSession session;
        std::uint64_t seed = 0;
        bool persisted = false;
    };

    std::shared_ptr<Slot> find_(const std::string& session_id) const;
    void persist_if_closed_(Slot& slot);
    std::uint64_t next_seed_();

    std::shared_ptr<const Engine> engine_;
    ServerConfig config_;
    std::shared_ptr<TrajectoryStore> store_;
    Clock clock_;

    mutable std::shared_mutex registry_mutex_;
    std::map<std::string, Challenge> challenges_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::atomic<std::uint64_t> counter_{0};
};

/// Routes the HTTP API onto a GameService.
class HttpServer {
public:
    explicit HttpServer(std::shared_ptr<GameService> service);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Blocks until stop(). Returns false if the socket could not be bound.
    bool listen(const std::string& host, int port);
    /// Binds an ephemeral port and returns it, or -1 on failure.
    int bind_any(const std::string& host);
    /// Serves on a socket prepared by bind_any(); blocks until stop().
    bool listen_after_bind();
    void stop();
    bool is_running() const;

private:
    std::shared_ptr<GameService> service_;
    std::unique_ptr<httplib::Server> server_;
};

/// Loads lexicon and graph and builds the navigation graph.
std::shared_ptr<const Engine> load_engine(const ServerConfig& config);

}  // namespace mindle
