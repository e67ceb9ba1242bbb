#include "mindle/challenges.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <random>
#include <sstream>
#include <unordered_set>

namespace mindle {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string challenge_id(std::uint64_t seed, ConceptId start, ConceptId target) {
    const std::uint64_t h =
        splitmix64(seed ^ splitmix64((static_cast<std::uint64_t>(start.index) << 32) | target.index));
    char buf[24];
    std::snprintf(buf, sizeof buf, "ch-%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::size_t parse_size(std::string_view s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("invalid difficulty component '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

void Difficulty::validate() const {
    if (min_len < 1) throw std::invalid_argument("difficulty min_len must be at least 1");
    if (max_len < min_len) throw std::invalid_argument("difficulty max_len must be >= min_len");
    if (min_paths < 1) throw std::invalid_argument("difficulty min_paths must be at least 1");
}

Difficulty Difficulty::parse(std::string_view text) {
    if (text == "easy") return easy();
    if (text == "medium") return medium();
    if (text == "hard") return hard();
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const auto comma = text.find(',', pos);
        parts.push_back(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (parts.size() != 3) {
        throw std::invalid_argument("difficulty must be easy, medium, hard or min_len,max_len,min_paths");
    }
    Difficulty d{parse_size(parts[0]), parse_size(parts[1]), parse_size(parts[2])};
    d.validate();
    return d;
}

std::vector<ConceptId> topic_members(const Lexicon& lexicon, std::string_view topic, const TopicOptions& options) {
    std::string normalized(topic);
    std::replace(normalized.begin(), normalized.end(), '_', ' ');
    std::istringstream words(normalized);
    std::vector<ConceptId> topic_words;
    std::string w;
    while (words >> w) {
        if (auto id = lexicon.lookup(w)) topic_words.push_back(*id);
    }
    if (topic_words.empty()) throw UnknownTopicError("no word of topic '" + std::string(topic) + "' is in the vocabulary");

    std::vector<double> query(lexicon.dim(), 0.0);
    for (ConceptId c : topic_words) {
        const auto v = lexicon.vector(c);
        for (std::size_t i = 0; i < v.size(); ++i) query[i] += v[i] / static_cast<double>(topic_words.size());
    }

    const std::unordered_set<ConceptId> skip(topic_words.begin(), topic_words.end());
    std::vector<std::pair<ConceptId, double>> members;
    const bool zero_query = std::all_of(query.begin(), query.end(), [](double x) { return x == 0.0; });
    if (zero_query) return {};
    for (std::uint32_t i = 0; i < lexicon.size(); ++i) {
        const ConceptId c{i};
        if (skip.contains(c)) continue;
        const double cos = lexicon.similarity_to(query, c);
        if (cos >= options.threshold) members.emplace_back(c, cos);
    }
    std::sort(members.begin(), members.end(), [](const auto& x, const auto& y) {
        return x.second != y.second ? x.second > y.second : x.first < y.first;
    });
    if (members.size() > options.max_members) members.resize(options.max_members);

    std::vector<ConceptId> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.first);
    return out;
}

Challenge generate_challenge(const NavigationGraph& nav, const Lexicon& lexicon, const Difficulty& difficulty,
                             std::uint64_t seed, const ChallengeOptions& options) {
    difficulty.validate();
    if (nav.node_count() < 2) throw InfeasibleDifficultyError("graph", "navigation graph has fewer than two nodes");
    if (nav.node_count() != lexicon.size()) throw std::invalid_argument("navigation graph and lexicon sizes differ");

    std::vector<ConceptId> targets;
    std::vector<ConceptId> starts;
    if (options.topic) {
        targets = topic_members(lexicon, *options.topic, options.topic_options);
        if (targets.empty()) {
            throw InfeasibleDifficultyError("topic", "topic '" + *options.topic + "' has no member concepts");
        }
        // Start outside the topic so that the hint carries information.
        const std::unordered_set<ConceptId> members(targets.begin(), targets.end());
        for (std::uint32_t i = 0; i < nav.node_count(); ++i) {
            if (!members.contains(ConceptId{i})) starts.push_back(ConceptId{i});
        }
        if (starts.empty()) throw InfeasibleDifficultyError("topic", "topic covers the whole vocabulary");
    } else {
        for (std::uint32_t i = 0; i < nav.node_count(); ++i) targets.push_back(ConceptId{i});
        starts = targets;
    }

    std::mt19937_64 rng(seed);
    std::size_t too_short = 0;
    std::size_t too_long = 0;
    std::size_t too_few_paths = 0;
    for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
        const ConceptId target = targets[rng() % targets.size()];
        const ConceptId start = starts[rng() % starts.size()];
        if (start == target) {
            ++too_short;
            continue;
        }
        const auto path = shortest_path(nav, start, target);
        if (!path || path->length > difficulty.max_len) {
            ++too_long;
            continue;
        }
        if (path->length < difficulty.min_len) {
            ++too_short;
            continue;
        }
        if (count_paths(nav, start, target, difficulty.max_len, difficulty.min_paths) < difficulty.min_paths) {
            ++too_few_paths;
            continue;
        }
        return Challenge{challenge_id(seed, start, target), target, start, options.topic, difficulty, seed};
    }

    std::ostringstream msg;
    msg << "no start/target pair met difficulty (" << difficulty.min_len << ", " << difficulty.max_len << ", "
        << difficulty.min_paths << ") in " << options.max_attempts << " attempts: ";
    if (too_few_paths >= too_long && too_few_paths >= too_short && too_few_paths > 0) {
        msg << "path count below " << difficulty.min_paths;
        throw InfeasibleDifficultyError("path_count", msg.str());
    }
    msg << "shortest path outside [" << difficulty.min_len << ", " << difficulty.max_len << "]";
    throw InfeasibleDifficultyError("shortest_path", msg.str());
}

nlohmann::ordered_json challenge_to_player_json(const Challenge& challenge, const Lexicon& lexicon) {
    nlohmann::ordered_json j;
    j["challenge_id"] = challenge.id;
    j["start_word"] = lexicon.word(challenge.start);
    if (challenge.topic) j["topic_hint"] = *challenge.topic;
    return j;
}

nlohmann::ordered_json challenge_to_json(const Challenge& challenge, const Lexicon& lexicon) {
    nlohmann::ordered_json j = challenge_to_player_json(challenge, lexicon);
    j["target_word"] = lexicon.word(challenge.target);
    j["difficulty"] = {{"min_len", challenge.difficulty.min_len},
                       {"max_len", challenge.difficulty.max_len},
                       {"min_paths", challenge.difficulty.min_paths}};
    j["seed"] = challenge.seed;
    return j;
}

Challenge challenge_from_json(const nlohmann::json& j, const Lexicon& lexicon) {
    auto word_id = [&](const char* key) {
        const auto word = j.at(key).get<std::string>();
        auto id = lexicon.lookup(word);
        if (!id) throw std::invalid_argument(std::string(key) + " '" + word + "' is not in the vocabulary");
        return *id;
    };
    Challenge c;
    c.id = j.at("challenge_id").get<std::string>();
    c.start = word_id("start_word");
    c.target = word_id("target_word");
    if (j.contains("topic_hint") && !j["topic_hint"].is_null()) c.topic = j["topic_hint"].get<std::string>();
    if (j.contains("difficulty")) {
        const auto& d = j["difficulty"];
        c.difficulty = Difficulty{d.at("min_len").get<std::size_t>(), d.at("max_len").get<std::size_t>(),
                                  d.at("min_paths").get<std::uint64_t>()};
    }
    c.seed = j.value("seed", std::uint64_t{0});
    if (c.start == c.target) throw std::invalid_argument("challenge start and target must differ");
    return c;
}

}  // namespace mindle
