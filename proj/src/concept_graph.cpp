#include "mindle/concept_graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

namespace mindle {

namespace {

bool edge_less(const WeightedEdge& e, ConceptId id) { return e.to < id; }

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    return a > max - b ? max : a + b;
}

std::string format_weight(double w) {
    if (std::floor(w) == w && std::fabs(w) < 1e15) {
        return std::to_string(static_cast<long long>(w));
    }
    std::ostringstream os;
    os << std::setprecision(17) << w;
    return os.str();
}

}  // namespace

ConceptGraph::ConceptGraph(std::size_t node_count) : rows_(node_count), row_sums_(node_count, 0.0) {}

void ConceptGraph::add_weight(ConceptId from, ConceptId to, double weight) {
    if (from.index >= rows_.size() || to.index >= rows_.size()) throw std::out_of_range("graph node out of range");
    if (from == to) throw std::invalid_argument("self-edges are not allowed");
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw std::invalid_argument("edge weights must be finite and >= 0");
    if (weight == 0.0) return;
    auto& row = rows_[from.index];
    auto it = std::lower_bound(row.begin(), row.end(), to, edge_less);
    if (it != row.end() && it->to == to) {
        it->weight += weight;
    } else {
        row.insert(it, WeightedEdge{to, weight});
    }
    row_sums_[from.index] += weight;
}

void ConceptGraph::prune_below(double min_weight) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        auto& row = rows_[i];
        std::erase_if(row, [min_weight](const WeightedEdge& e) { return e.weight < min_weight; });
        double sum = 0.0;
        for (const auto& e : row) sum += e.weight;
        row_sums_[i] = sum;
    }
}

std::size_t ConceptGraph::edge_count() const noexcept {
    std::size_t n = 0;
    for (const auto& row : rows_) n += row.size();
    return n;
}

double ConceptGraph::weight(ConceptId from, ConceptId to) const {
    const auto& row = rows_.at(from.index);
    auto it = std::lower_bound(row.begin(), row.end(), to, edge_less);
    return (it != row.end() && it->to == to) ? it->weight : 0.0;
}

ConceptGraph build_graph(std::istream& tokens, std::size_t window, const Lexicon& lexicon) {
    if (window == 0) throw std::invalid_argument("window must be at least 1");
    std::vector<std::unordered_map<std::uint32_t, double>> counts(lexicon.size());
    std::string line;
    std::vector<std::optional<ConceptId>> ids;
    while (std::getline(tokens, line)) {
        ids.clear();
        std::istringstream words(line);
        std::string w;
        while (words >> w) ids.push_back(lexicon.lookup(w));
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (!ids[i]) continue;
            const std::size_t end = std::min(ids.size(), i + window + 1);
            for (std::size_t j = i + 1; j < end; ++j) {
                if (!ids[j] || *ids[j] == *ids[i]) continue;
                counts[ids[i]->index][ids[j]->index] += 1.0;
            }
        }
    }

    ConceptGraph graph(lexicon.size());
    std::vector<std::pair<std::uint32_t, double>> row;
    for (std::uint32_t i = 0; i < counts.size(); ++i) {
        row.assign(counts[i].begin(), counts[i].end());
        std::sort(row.begin(), row.end());
        for (const auto& [k, w] : row) graph.add_weight(ConceptId{i}, ConceptId{k}, w);
    }
    return graph;
}

TransitionProbability transition_prob(const ConceptGraph& graph, ConceptId i, ConceptId k) {
    if (i == k) throw std::invalid_argument("transition_prob requires i != k");
    const double total = graph.row_sum(i);
    if (total <= 0.0) return {0.0, true};
    return {graph.weight(i, k) / total, false};
}

std::vector<std::pair<ConceptId, double>> rank_related(
    const ConceptGraph& graph, ConceptId c, std::size_t k, RelatedDirection direction) {
    if (c.index >= graph.node_count()) throw std::out_of_range("graph node out of range");
    std::vector<std::pair<ConceptId, double>> ranked;

    if (direction == RelatedDirection::most) {
        for (const auto& e : graph.out_edges(c)) ranked.emplace_back(e.to, e.weight);
        auto before = [](const auto& x, const auto& y) {
            return x.second != y.second ? x.second > y.second : x.first < y.first;
        };
        const std::size_t n = std::min(k, ranked.size());
        std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n), ranked.end(), before);
        ranked.resize(n);
        return ranked;
    }

    // Least related: zero-weight concepts come first in id order, so they can
    // be emitted without materialising the whole row.
    const auto& row = graph.out_edges(c);
    std::size_t edge = 0;
    for (std::uint32_t id = 0; id < graph.node_count() && ranked.size() < k; ++id) {
        if (id == c.index) continue;
        while (edge < row.size() && row[edge].to.index < id) ++edge;
        if (edge < row.size() && row[edge].to.index == id) continue;
        ranked.emplace_back(ConceptId{id}, 0.0);
    }
    if (ranked.size() < k) {
        std::vector<std::pair<ConceptId, double>> positive;
        for (const auto& e : row) positive.emplace_back(e.to, e.weight);
        std::sort(positive.begin(), positive.end(), [](const auto& x, const auto& y) {
            return x.second != y.second ? x.second < y.second : x.first < y.first;
        });
        for (const auto& p : positive) {
            if (ranked.size() >= k) break;
            ranked.push_back(p);
        }
    }
    return ranked;
}

void save_graph(std::ostream& out, const ConceptGraph& graph, const Lexicon& lexicon) {
    if (graph.node_count() != lexicon.size()) throw std::invalid_argument("graph and lexicon sizes differ");
    out << kGraphHeader << '\n';
    for (std::uint32_t i = 0; i < graph.node_count(); ++i) {
        for (const auto& e : graph.out_edges(ConceptId{i})) {
            out << lexicon.word(ConceptId{i}) << '\t' << lexicon.word(e.to) << '\t' << format_weight(e.weight) << '\n';
        }
    }
}

ConceptGraph load_graph(std::istream& in, const Lexicon& lexicon) {
    ConceptGraph graph(lexicon.size());
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header_seen) {
            if (line != kGraphHeader) throw ParseError(line_no, "missing '" + std::string(kGraphHeader) + "' header");
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;

        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos || line.find('\t', tab2 + 1) != std::string::npos) {
            throw ParseError(line_no, "expected three tab-separated fields");
        }
        const std::string from_word = line.substr(0, tab1);
        const std::string to_word = line.substr(tab1 + 1, tab2 - tab1 - 1);
        const std::string weight_text = line.substr(tab2 + 1);

        const auto from = lexicon.lookup(from_word);
        if (!from) throw ParseError(line_no, "unknown word '" + from_word + "'");
        const auto to = lexicon.lookup(to_word);
        if (!to) throw ParseError(line_no, "unknown word '" + to_word + "'");
        if (*from == *to) throw ParseError(line_no, "self-edge for '" + from_word + "'");

        double weight = 0.0;
        auto [ptr, ec] = std::from_chars(weight_text.data(), weight_text.data() + weight_text.size(), weight);
        if (ec != std::errc{} || ptr != weight_text.data() + weight_text.size() || !std::isfinite(weight) ||
            weight < 0.0) {
            throw ParseError(line_no, "invalid weight '" + weight_text + "'");
        }
        if (graph.weight(*from, *to) != 0.0) throw ParseError(line_no, "duplicate edge " + from_word + " -> " + to_word);
        graph.add_weight(*from, *to, weight);
    }
    if (!header_seen) throw ParseError(line_no, "empty graph file");
    return graph;
}

ConceptGraph load_graph_file(const std::string& path, const Lexicon& lexicon) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    return load_graph(in, lexicon);
}

bool NavigationGraph::add_edge(ConceptId from, ConceptId to, EdgeKind kind) {
    if (from.index >= adjacency_.size() || to.index >= adjacency_.size()) {
        throw std::out_of_range("navigation node out of range");
    }
    if (from == to) return false;
    auto& row = adjacency_[from.index];
    auto it = std::lower_bound(row.begin(), row.end(), to, [](const NavEdge& e, ConceptId id) { return e.to < id; });
    if (it != row.end() && it->to == to) return false;
    row.insert(it, NavEdge{to, kind});
    return true;
}

std::size_t NavigationGraph::edge_count() const noexcept {
    std::size_t n = 0;
    for (const auto& row : adjacency_) n += row.size();
    return n;
}

NavigationGraph prune(const ConceptGraph& graph, const Lexicon& lexicon, std::size_t k) {
    if (k == 0) throw std::invalid_argument("prune requires K >= 1");
    if (graph.node_count() != lexicon.size()) throw std::invalid_argument("graph and lexicon sizes differ");
    NavigationGraph nav(lexicon.size());
    for (std::uint32_t i = 0; i < lexicon.size(); ++i) {
        const ConceptId c{i};
        // An edge that is both similar and related keeps the similar tag.
        for (const auto& [to, cos] : lexicon.top_similar(c, k)) nav.add_edge(c, to, EdgeKind::similar);
        for (const auto& [to, w] : rank_related(graph, c, k, RelatedDirection::most)) {
            nav.add_edge(c, to, EdgeKind::related);
        }
    }
    return nav;
}

std::optional<Path> shortest_path(const NavigationGraph& nav, ConceptId a, ConceptId b) {
    if (a.index >= nav.node_count() || b.index >= nav.node_count()) throw std::out_of_range("navigation node out of range");
    if (a == b) return Path{0, {a}};

    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> parent(nav.node_count(), kNone);
    parent[a.index] = a.index;
    std::deque<ConceptId> queue{a};
    while (!queue.empty()) {
        const ConceptId u = queue.front();
        queue.pop_front();
        for (const auto& e : nav.out_edges(u)) {
            if (parent[e.to.index] != kNone) continue;
            parent[e.to.index] = u.index;
            if (e.to == b) {
                Path path;
                for (ConceptId v = b; v != a; v = ConceptId{parent[v.index]}) path.nodes.push_back(v);
                path.nodes.push_back(a);
                std::reverse(path.nodes.begin(), path.nodes.end());
                path.length = path.nodes.size() - 1;
                return path;
            }
            queue.push_back(e.to);
        }
    }
    return std::nullopt;
}

namespace {

// Hop distance from every node to `target`, capped at `limit` (larger means unreachable within limit).
std::vector<std::size_t> distances_to(const NavigationGraph& nav, ConceptId target, std::size_t limit) {
    std::vector<std::vector<std::uint32_t>> reverse(nav.node_count());
    for (std::uint32_t u = 0; u < nav.node_count(); ++u) {
        for (const auto& e : nav.out_edges(ConceptId{u})) reverse[e.to.index].push_back(u);
    }
    std::vector<std::size_t> dist(nav.node_count(), limit + 1);
    dist[target.index] = 0;
    std::deque<std::uint32_t> queue{target.index};
    while (!queue.empty()) {
        const auto v = queue.front();
        queue.pop_front();
        if (dist[v] >= limit) continue;
        for (auto u : reverse[v]) {
            if (dist[u] <= limit) continue;
            dist[u] = dist[v] + 1;
            queue.push_back(u);
        }
    }
    return dist;
}

struct SimplePathCounter {
    const NavigationGraph& nav;
    ConceptId target;
    std::size_t max_len;
    std::uint64_t stop_at;
    const std::vector<std::size_t>& dist;
    std::vector<bool> on_path;
    std::uint64_t count = 0;

    void visit(ConceptId v, std::size_t depth) {
        if (count >= stop_at) return;
        if (v == target) {
            ++count;
            return;
        }
        on_path[v.index] = true;
        for (const auto& e : nav.out_edges(v)) {
            if (on_path[e.to.index]) continue;
            if (depth + 1 + dist[e.to.index] > max_len) continue;
            visit(e.to, depth + 1);
        }
        on_path[v.index] = false;
    }
};

}  // namespace

std::uint64_t count_paths(const NavigationGraph& nav, ConceptId a, ConceptId b, std::size_t max_len,
                          std::uint64_t stop_at) {
    if (max_len == 0) throw std::invalid_argument("count_paths requires max_len >= 1");
    if (a.index >= nav.node_count() || b.index >= nav.node_count()) throw std::out_of_range("navigation node out of range");
    if (stop_at == 0) return 0;
    if (a == b) return 1;

    const auto dist = distances_to(nav, b, max_len);
    if (dist[a.index] > max_len) return 0;

    if (max_len <= kExactPathLimit) {
        SimplePathCounter counter{nav, b, max_len, stop_at, dist, std::vector<bool>(nav.node_count(), false)};
        counter.visit(a, 0);
        return std::min(counter.count, stop_at);
    }

    // Walk counts over-approximate simple paths; b is absorbing so walks end on arrival.
    std::vector<std::uint64_t> walks(nav.node_count(), 0);
    walks[a.index] = 1;
    std::uint64_t total = 0;
    for (std::size_t step = 0; step < max_len; ++step) {
        std::vector<std::uint64_t> next(nav.node_count(), 0);
        for (std::uint32_t u = 0; u < nav.node_count(); ++u) {
            if (walks[u] == 0 || u == b.index) continue;
            for (const auto& e : nav.out_edges(ConceptId{u})) {
                next[e.to.index] = saturating_add(next[e.to.index], walks[u]);
            }
        }
        total = saturating_add(total, next[b.index]);
        if (total >= stop_at) return stop_at;
        walks = std::move(next);
    }
    return total;
}

}  // namespace mindle
