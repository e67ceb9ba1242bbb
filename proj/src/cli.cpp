#include "mindle/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "mindle/analysis.hpp"
#include "mindle/service.hpp"
#include "mindle/trajectory_store.hpp"

namespace mindle {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GlobalOptions {
    std::string config_file;
    ConfigOverrides overrides;
};

ServerConfig resolve(const GlobalOptions& g, const EnvLookup& env) {
    std::optional<std::string> file;
    if (!g.config_file.empty()) file = g.config_file;
    ServerConfig config = resolve_config(file, env, g.overrides);
    config.validate(false);
    return config;
}

Lexicon require_lexicon(const ServerConfig& config) {
    if (config.embeddings_path.empty()) throw UsageError("an embeddings file is required (--embeddings or MINDLE_EMBEDDINGS)");
    return load_lexicon_file(config.embeddings_path, config.vocab_limit);
}

std::shared_ptr<const Engine> require_engine(const ServerConfig& config) {
    if (config.graph_path.empty()) throw UsageError("a graph file is required (--graph or MINDLE_GRAPH)");
    Lexicon lexicon = require_lexicon(config);
    ConceptGraph graph = load_graph_file(config.graph_path, lexicon);
    return Engine::make(std::move(lexicon), std::move(graph), config.proposal_config(), config.classify_thresholds());
}

std::string format_score(double score) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << score;
    return os.str();
}

int cmd_build_graph(const ServerConfig& config, const std::string& corpus, std::size_t window, double min_count,
                    const std::string& out_path, std::ostream& out) {
    const Lexicon lexicon = require_lexicon(config);
    std::ifstream in(corpus);
    if (!in) throw std::runtime_error("cannot read corpus " + corpus);
    ConceptGraph graph = build_graph(in, window, lexicon);
    graph.prune_below(min_count);
    std::ofstream file(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    save_graph(file, graph, lexicon);
    file.flush();
    if (!file) throw std::runtime_error("write to " + out_path + " failed");
    out << "wrote " << graph.edge_count() << " edges over " << lexicon.size() << " concepts to " << out_path << '\n';
    return kExitOk;
}

Challenge make_challenge(const ServerConfig& config, const Engine& engine, const std::string& difficulty,
                         const std::optional<std::string>& topic, std::uint64_t seed) {
    ChallengeOptions options;
    options.topic = topic;
    options.topic_options = config.topic_options();
    options.max_attempts = config.max_attempts;
    auto preset = config.difficulty_presets.find(difficulty);
    const Difficulty d = preset != config.difficulty_presets.end() ? preset->second : Difficulty::parse(difficulty);
    return generate_challenge(engine.navigation, engine.lexicon, d, seed, options);
}

int cmd_challenge(const ServerConfig& config, const std::string& difficulty, const std::optional<std::string>& topic,
                  std::uint64_t seed, std::ostream& out) {
    const auto engine = require_engine(config);
    const Challenge c = make_challenge(config, *engine, difficulty, topic, seed);
    out << challenge_to_json(c, engine->lexicon).dump() << '\n';
    return kExitOk;
}

void print_options(GameSession& session, std::ostream& out) {
    const auto& set = session.options();
    std::vector<std::string> words;
    for (const auto* list : {&set.similar, &set.related, &set.unrelated}) {
        for (ConceptId c : *list) words.push_back(session.engine().lexicon.word(c));
    }
    std::sort(words.begin(), words.end());
    out << "options:";
    for (const auto& w : words) out << ' ' << w;
    out << '\n';
}

int cmd_play(const ServerConfig& config, const std::string& challenge_file, std::uint64_t seed,
             const std::string& difficulty, const std::string& mode_text, bool write_log, std::istream& in,
             std::ostream& out) {
    const auto engine = require_engine(config);
    const auto mode = parse_session_mode(mode_text);
    if (!mode) throw UsageError("--mode must be typing, options or both");

    Challenge challenge;
    if (!challenge_file.empty()) {
        std::ifstream file(challenge_file);
        if (!file) throw std::runtime_error("cannot read challenge file " + challenge_file);
        challenge = challenge_from_json(nlohmann::json::parse(file), engine->lexicon);
    } else {
        challenge = make_challenge(config, *engine, difficulty, std::nullopt, seed);
    }

    char sid[32];
    std::snprintf(sid, sizeof sid, "cli-%016llx", static_cast<unsigned long long>(std::random_device{}()) << 32 |
                                                      static_cast<unsigned long long>(system_clock_ms() & 0xffffffff));
    GameSession session(engine, challenge, *mode, sid);
    const auto& lex = engine->lexicon;

    out << "start: " << lex.word(challenge.start) << "  score " << format_score(session.trajectory().records[0].score)
        << '\n';
    if (challenge.topic) out << "topic: " << *challenge.topic << '\n';

    std::string line;
    while (session.is_open() && std::getline(in, line)) {
        std::istringstream words(line);
        std::string cmd;
        if (!(words >> cmd)) continue;
        try {
            if (cmd == "quit") {
                session.quit();
                out << "gave up after " << session.trajectory().records.size() - 1 << " guesses; the word was "
                    << lex.word(challenge.target) << '\n';
                break;
            }
            if (cmd == "options") {
                print_options(session, out);
                continue;
            }
            GuessResult result;
            if (cmd == "pick") {
                std::string word;
                if (!(words >> word)) {
                    out << "usage: pick <word>\n";
                    continue;
                }
                result = session.select_option(word);
            } else {
                result = session.submit_guess(cmd);
            }
            if (const auto* oov = std::get_if<OutOfVocabulary>(&result)) {
                out << "'" << oov->word << "' is not in the word list\n";
                continue;
            }
            const auto& g = std::get<GuessOutcome>(result);
            out << '#' << g.step << ' ' << session.trajectory().records.back().word << "  score " << format_score(g.score)
                << '\n';
            if (g.hit) {
                out << "*** solved in " << g.step << (g.step == 1 ? " guess: " : " guesses: ") << lex.word(challenge.target)
                    << " ***\n";
            }
        } catch (const ModeViolationError& e) {
            out << e.what() << '\n';
        } catch (const InvalidOptionError& e) {
            out << e.what() << '\n';
        }
    }
    if (session.is_open()) session.quit();

    if (write_log) {
        TrajectoryStore store(config.data_dir, lex, config.hash());
        store.persist(session.trajectory());
    }
    return kExitOk;
}

int cmd_serve(const ServerConfig& config, std::ostream& out) {
    config.validate(true);
    auto engine = load_engine(config);
    auto store = std::make_shared<TrajectoryStore>(config.data_dir, engine->lexicon, config.hash());
    auto service = std::make_shared<GameService>(engine, config, store);
    HttpServer server(service);
    out << "mindle serving " << engine->lexicon.size() << " concepts on " << config.host << ':' << config.port
        << std::endl;
    if (!server.listen(config.host, config.port)) {
        throw std::runtime_error("cannot listen on " + config.host + ":" + std::to_string(config.port));
    }
    return kExitOk;
}

int cmd_analyze(const ServerConfig& config, const std::string& log_path, const std::vector<std::string>& sessions,
                const std::string& space_text, const std::string& variant_text, bool with_rates, std::ostream& out) {
    const auto space = parse_action_space(space_text);
    if (!space) throw UsageError("--space must be full, masked or three-types");
    if (variant_text != "literal" && variant_text != "best-counterfactual") {
        throw UsageError("--variant must be literal or best-counterfactual");
    }

    Lexicon lexicon = require_lexicon(config);
    ConceptGraph graph = config.graph_path.empty() ? ConceptGraph(lexicon.size())
                                                   : load_graph_file(config.graph_path, lexicon);
    Engine engine{std::move(lexicon), std::move(graph), {}, config.proposal_config(), config.classify_thresholds()};

    TrajectoryFilter filter;
    filter.session_ids = sessions;
    const auto path = log_path.empty() ? std::filesystem::path(config.data_dir) : std::filesystem::path(log_path);
    if (!std::filesystem::exists(path)) throw std::runtime_error("log not found: " + path.string());
    const auto trajectories = load_log_path(path, engine.lexicon, filter);
    if (!sessions.empty() && trajectories.empty()) throw std::runtime_error("no matching session in " + path.string());

    AnalysisConfig cfg;
    cfg.eureka_threshold = config.theta_eureka;
    cfg.space = *space;
    cfg.variant = variant_text == "literal" ? RateVariant::literal : RateVariant::best_counterfactual;
    for (const auto& traj : trajectories) {
        const auto report = analyze_trajectory(traj, cfg, with_rates ? &engine : nullptr);
        nlohmann::ordered_json j;
        j["session_id"] = traj.session_id;
        j["challenge_id"] = traj.challenge.id;
        j["outcome"] = to_string(traj.outcome);
        const auto report_json = report_to_json(report, cfg.variant);
        for (const auto& [key, value] : report_json.items()) j[key] = value;
        const auto labels = label_actions(traj, engine.lexicon, engine.graph, engine.thresholds);
        nlohmann::ordered_json types = nlohmann::ordered_json::array();
        for (auto t : labels.labels) types.push_back(to_string(t));
        j["action_types"] = types;
        out << j.dump() << '\n';
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
            const EnvLookup& env) {
    CLI::App app{"Mindle: semantic word-search game and trajectory analysis", "mindle"};
    app.require_subcommand(1, 1);

    GlobalOptions g;
    std::string embeddings, graph, data_dir;
    std::size_t vocab_limit = 0, k = 0;
    app.add_option("--config", g.config_file, "JSON config file");
    app.add_option("--embeddings", embeddings, "word vector text file");
    app.add_option("--graph", graph, "concept graph file");
    app.add_option("--vocab-limit", vocab_limit, "maximum vocabulary size");
    app.add_option("--k", k, "proposals per type");
    app.add_option("--data-dir", data_dir, "directory for trajectory logs");

    auto* build = app.add_subcommand("build-graph", "count co-occurrences into a graph file");
    std::string corpus, out_path;
    std::size_t window = 5;
    double min_count = 1;
    build->add_option("--corpus", corpus, "tokenized text, one sentence per line")->required();
    build->add_option("--window", window, "co-occurrence window")->check(CLI::PositiveNumber);
    build->add_option("--min-count", min_count, "drop edges below this weight");
    build->add_option("--out", out_path, "graph file to write")->required();

    auto* chal = app.add_subcommand("challenge", "generate a challenge record");
    std::string difficulty = "easy";
    std::string topic;
    std::uint64_t seed = 0;
    chal->add_option("--difficulty", difficulty, "easy|medium|hard|min_len,max_len,min_paths");
    chal->add_option("--topic", topic, "topic hint");
    chal->add_option("--seed", seed, "RNG seed");

    auto* play = app.add_subcommand("play", "play a challenge in the terminal");
    std::string challenge_file, mode = "both";
    bool no_log = false;
    auto* file_opt = play->add_option("--challenge-file", challenge_file, "challenge record (JSON)");
    play->add_option("--seed", seed, "seed for a generated challenge")->excludes(file_opt);
    play->add_option("--difficulty", difficulty, "difficulty for a generated challenge")->excludes(file_opt);
    play->add_option("--mode", mode, "typing|options|both");
    play->add_flag("--no-log", no_log, "do not append the trajectory to the log");

    auto* serve = app.add_subcommand("serve", "run the HTTP game server");
    int port = 0;
    serve->add_option("--port", port, "listen port")->check(CLI::Range(1, 65535));

    auto* analyze = app.add_subcommand("analyze", "compute eureka reports from trajectory logs");
    std::string log_path, space = "full", variant = "literal";
    std::vector<std::string> sessions;
    bool no_rates = false;
    analyze->add_option("--log", log_path, "log file or directory (default: data dir)");
    analyze->add_option("--session", sessions, "session id(s) to analyze");
    analyze->add_option("--space", space, "full|masked|three-types");
    analyze->add_option("--variant", variant, "literal|best-counterfactual");
    analyze->add_flag("--no-rates", no_rates, "skip counterfactual updating rates");

    std::vector<const char*> argv{"mindle"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (!embeddings.empty()) g.overrides.embeddings_path = embeddings;
    if (!graph.empty()) g.overrides.graph_path = graph;
    if (!data_dir.empty()) g.overrides.data_dir = data_dir;
    if (vocab_limit > 0) g.overrides.vocab_limit = vocab_limit;
    if (k > 0) g.overrides.k = k;
    if (port > 0) g.overrides.port = port;

    try {
        const ServerConfig config = resolve(g, env);
        if (*build) return cmd_build_graph(config, corpus, window, min_count, out_path, out);
        if (*chal) return cmd_challenge(config, difficulty, topic.empty() ? std::nullopt : std::optional(topic), seed, out);
        if (*play) return cmd_play(config, challenge_file, seed, difficulty, mode, !no_log, in, out);
        if (*serve) return cmd_serve(config, out);
        if (*analyze) return cmd_analyze(config, log_path, sessions, space, variant, !no_rates, out);
    } catch (const UsageError& e) {
        err << "mindle: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "mindle: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace mindle
