#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "mindle/challenges.hpp"
#include "mindle/proposals.hpp"

namespace mindle {

struct ServerConfig {
    std::string embeddings_path;
    std::string graph_path;
    std::size_t vocab_limit = kDefaultVocabLimit;
    std::size_t k = 10;
    int port = 8080;
    std::string host = "0.0.0.0";
    std::string data_dir = "data";
    std::map<std::string, Difficulty> difficulty_presets{
        {"easy", Difficulty::easy()}, {"medium", Difficulty::medium()}, {"hard", Difficulty::hard()}};
    double theta_sim = 0.55;
    double theta_rel = 0.8;
    double theta_topic = 0.35;
    std::size_t topic_max_members = 500;
    double theta_eureka = 20.0;
    std::size_t max_attempts = 10000;
    std::uint64_t seed = 0;

    /// Port range and threshold sanity; with `check_paths`, input files must exist.
    void validate(bool check_paths) const;
    nlohmann::ordered_json to_json() const;
    /// FNV-1a over the canonical JSON form, as 16 hex digits.
    std::string hash() const;

    ProposalConfig proposal_config() const;
    ClassifyThresholds classify_thresholds() const;
    TopicOptions topic_options() const;
};

/// Overrides given on the command line; unset fields fall through.
struct ConfigOverrides {
    std::optional<std::string> embeddings_path;
    std::optional<std::string> graph_path;
    std::optional<std::size_t> vocab_limit;
    std::optional<std::size_t> k;
    std::optional<int> port;
    std::optional<std::string> data_dir;
    std::optional<std::uint64_t> seed;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

/// Applies a config file object onto `config`. Unknown keys are rejected.
void apply_config_json(ServerConfig& config, const nlohmann::json& j);

/// Defaults, then the config file (if any), then MINDLE_* variables, then flags.
ServerConfig resolve_config(const std::optional<std::string>& config_file, const EnvLookup& env,
                            const ConfigOverrides& flags);

}  // namespace mindle
