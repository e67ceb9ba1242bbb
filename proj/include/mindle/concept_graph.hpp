#pragma once

#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mindle/lexicon.hpp"

namespace mindle {

struct WeightedEdge {
    ConceptId to;
    double weight = 0.0;
};

/// Directed co-occurrence weights w(c_i, c_k) over a lexicon's concepts.
/// Rows are sorted by target id; no self-edges; weights are positive.
class ConceptGraph {
public:
    ConceptGraph() = default;
    explicit ConceptGraph(std::size_t node_count);

    /// Accumulates `weight` onto w(from, to). Throws on self-edges,
    /// negative weights or out-of-range ids.
    void add_weight(ConceptId from, ConceptId to, double weight);
    /// Drops every edge whose weight is below `min_weight`.
    void prune_below(double min_weight);

    std::size_t node_count() const noexcept { return rows_.size(); }
    std::size_t edge_count() const noexcept;
    double weight(ConceptId from, ConceptId to) const;
    double row_sum(ConceptId from) const { return row_sums_.at(from.index); }
    const std::vector<WeightedEdge>& out_edges(ConceptId from) const { return rows_.at(from.index); }

private:
    std::vector<std::vector<WeightedEdge>> rows_;
    std::vector<double> row_sums_;
};

/// Counts ordered in-vocabulary token pairs within `window` positions on the
/// same line; the earlier token is the edge source. Out-of-vocabulary tokens
/// are skipped but still occupy their position.
ConceptGraph build_graph(std::istream& tokens, std::size_t window, const Lexicon& lexicon);

struct TransitionProbability {
    double probability = 0.0;
    bool isolated = false;
};

/// w(i, k) / sum_{j != i} w(i, j). Rows with no outgoing weight are flagged.
TransitionProbability transition_prob(const ConceptGraph& graph, ConceptId i, ConceptId k);

enum class RelatedDirection { most, least };

/// `most` ranks positive-weight neighbours by descending weight. `least`
/// ranks every other concept, zero-weight pairs included, by ascending
/// weight. Ties go to the lower id either way.
std::vector<std::pair<ConceptId, double>> rank_related(
    const ConceptGraph& graph, ConceptId c, std::size_t k, RelatedDirection direction);

// Graph file: "#mindle-graph v1" header, then "word_i<TAB>word_k<TAB>weight".
inline constexpr const char* kGraphHeader = "#mindle-graph v1";

void save_graph(std::ostream& out, const ConceptGraph& graph, const Lexicon& lexicon);
ConceptGraph load_graph(std::istream& in, const Lexicon& lexicon);
ConceptGraph load_graph_file(const std::string& path, const Lexicon& lexicon);

enum class EdgeKind : std::uint8_t { similar, related };

struct NavEdge {
    ConceptId to;
    EdgeKind kind = EdgeKind::similar;
};

/// Pruned graph used for difficulty control: per node, the top-K cosine
/// neighbours plus the top-K weighted neighbours.
class NavigationGraph {
public:
    NavigationGraph() = default;
    explicit NavigationGraph(std::size_t node_count) : adjacency_(node_count) {}

    /// Adds a directed edge unless the pair already has one; returns whether it was added.
    bool add_edge(ConceptId from, ConceptId to, EdgeKind kind);

    std::size_t node_count() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept;
    bool empty() const noexcept { return adjacency_.empty(); }
    const std::vector<NavEdge>& out_edges(ConceptId c) const { return adjacency_.at(c.index); }

private:
    std::vector<std::vector<NavEdge>> adjacency_;
};

NavigationGraph prune(const ConceptGraph& graph, const Lexicon& lexicon, std::size_t k);

struct Path {
    std::size_t length = 0;
    std::vector<ConceptId> nodes;
};

/// Breadth-first minimum hop path; std::nullopt when b is unreachable from a.
std::optional<Path> shortest_path(const NavigationGraph& nav, ConceptId a, ConceptId b);

inline constexpr std::size_t kExactPathLimit = 6;

/// Number of simple directed paths a -> b with at most `max_len` edges.
/// Exact for max_len <= kExactPathLimit. Above that it returns the number of
/// walks of length <= max_len, an upper bound. Counting stops early once
/// `stop_at` is reached (the return value is then `stop_at`). a == b counts
/// as one empty path.
std::uint64_t count_paths(const NavigationGraph& nav, ConceptId a, ConceptId b, std::size_t max_len,
                          std::uint64_t stop_at = std::numeric_limits<std::uint64_t>::max());

}  // namespace mindle
