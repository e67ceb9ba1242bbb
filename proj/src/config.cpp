#include "mindle/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace mindle {

namespace {

template <typename T>
T parse_number(const std::string& name, const std::string& text) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument(name + ": expected a number, got '" + text + "'");
    }
    return value;
}

}  // namespace

void ServerConfig::validate(bool check_paths) const {
    if (port < 1 || port > 65535) throw std::invalid_argument("port must be in [1, 65535]");
    if (vocab_limit == 0) throw std::invalid_argument("vocab limit must be at least 1");
    if (k == 0) throw std::invalid_argument("K must be at least 1");
    if (!(theta_rel >= 0.0 && theta_rel <= 1.0)) throw std::invalid_argument("theta_rel must be a quantile in [0, 1]");
    if (!(theta_eureka >= 0.0)) throw std::invalid_argument("theta_eureka must be >= 0");
    for (const auto& [name, d] : difficulty_presets) d.validate();
    if (check_paths) {
        if (embeddings_path.empty() || !std::filesystem::exists(embeddings_path)) {
            throw std::invalid_argument("embeddings file not found: '" + embeddings_path + "'");
        }
        if (graph_path.empty() || !std::filesystem::exists(graph_path)) {
            throw std::invalid_argument("graph file not found: '" + graph_path + "'");
        }
    }
}

nlohmann::ordered_json ServerConfig::to_json() const {
    nlohmann::ordered_json j;
    j["embeddings"] = embeddings_path;
    j["graph"] = graph_path;
    j["vocab_limit"] = vocab_limit;
    j["k"] = k;
    j["port"] = port;
    j["host"] = host;
    j["data_dir"] = data_dir;
    nlohmann::ordered_json presets;
    for (const auto& [name, d] : difficulty_presets) {
        presets[name] = {{"min_len", d.min_len}, {"max_len", d.max_len}, {"min_paths", d.min_paths}};
    }
    j["difficulty_presets"] = presets;
    j["theta_sim"] = theta_sim;
    j["theta_rel"] = theta_rel;
    j["theta_topic"] = theta_topic;
    j["topic_max_members"] = topic_max_members;
    j["theta_eureka"] = theta_eureka;
    j["max_attempts"] = max_attempts;
    j["seed"] = seed;
    return j;
}

std::string ServerConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json().dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ProposalConfig ServerConfig::proposal_config() const {
    ProposalConfig p;
    p.k = k;
    return p;
}

ClassifyThresholds ServerConfig::classify_thresholds() const { return {theta_sim, theta_rel}; }

TopicOptions ServerConfig::topic_options() const { return {theta_topic, topic_max_members}; }

std::optional<std::string> process_env(const std::string& name) {
    const char* value = std::getenv(name.c_str());
    if (!value) return std::nullopt;
    return std::string(value);
}

void apply_config_json(ServerConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "embeddings") c.embeddings_path = value.get<std::string>();
        else if (key == "graph") c.graph_path = value.get<std::string>();
        else if (key == "vocab_limit") c.vocab_limit = value.get<std::size_t>();
        else if (key == "k") c.k = value.get<std::size_t>();
        else if (key == "port") c.port = value.get<int>();
        else if (key == "host") c.host = value.get<std::string>();
        else if (key == "data_dir") c.data_dir = value.get<std::string>();
        else if (key == "theta_sim") c.theta_sim = value.get<double>();
        else if (key == "theta_rel") c.theta_rel = value.get<double>();
        else if (key == "theta_topic") c.theta_topic = value.get<double>();
        else if (key == "topic_max_members") c.topic_max_members = value.get<std::size_t>();
        else if (key == "theta_eureka") c.theta_eureka = value.get<double>();
        else if (key == "max_attempts") c.max_attempts = value.get<std::size_t>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "difficulty_presets") {
            for (const auto& [name, d] : value.items()) {
                c.difficulty_presets[name] = Difficulty{d.at("min_len").get<std::size_t>(),
                                                        d.at("max_len").get<std::size_t>(),
                                                        d.at("min_paths").get<std::uint64_t>()};
            }
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
}

ServerConfig resolve_config(const std::optional<std::string>& config_file, const EnvLookup& env,
                            const ConfigOverrides& flags) {
    ServerConfig c;

    if (config_file) {
        std::ifstream in(*config_file);
        if (!in) throw std::runtime_error("cannot read config file " + *config_file);
        apply_config_json(c, nlohmann::json::parse(in));
    }

    if (env) {
        if (auto v = env("MINDLE_EMBEDDINGS")) c.embeddings_path = *v;
        if (auto v = env("MINDLE_GRAPH")) c.graph_path = *v;
        if (auto v = env("MINDLE_VOCAB_LIMIT")) c.vocab_limit = parse_number<std::size_t>("MINDLE_VOCAB_LIMIT", *v);
        if (auto v = env("MINDLE_DATA_DIR")) c.data_dir = *v;
        if (auto v = env("MINDLE_PORT")) c.port = parse_number<int>("MINDLE_PORT", *v);
    }

    if (flags.embeddings_path) c.embeddings_path = *flags.embeddings_path;
    if (flags.graph_path) c.graph_path = *flags.graph_path;
    if (flags.vocab_limit) c.vocab_limit = *flags.vocab_limit;
    if (flags.k) c.k = *flags.k;
    if (flags.port) c.port = *flags.port;
    if (flags.data_dir) c.data_dir = *flags.data_dir;
    if (flags.seed) c.seed = *flags.seed;
    return c;
}

}  // namespace mindle
