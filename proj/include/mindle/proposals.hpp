#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mindle/concept_graph.hpp"
#include "mindle/lexicon.hpp"

namespace mindle {

enum class ActionType { similar, related, unrelated };

std::string_view to_string(ActionType type);
std::optional<ActionType> parse_action_type(std::string_view text);

enum class Linkage { average, complete, single, ward };

struct ProposalConfig {
    std::size_t k = 10;
    // Candidates scanned per list before filtering: k * overscan.
    std::size_t overscan = 3;
    Linkage linkage = Linkage::average;
};

/// Candidate next guesses of each type for an anchor concept.
struct ProposalSet {
    ConceptId anchor;
    std::vector<ConceptId> similar;
    std::vector<ConceptId> related;
    std::vector<ConceptId> unrelated;
    std::size_t k = 0;
    // Set when the anchor has no outgoing weight and `unrelated` came from cosine.
    bool isolated_fallback = false;

    std::optional<ActionType> type_of(ConceptId c) const;
    bool operator==(const ProposalSet&) const = default;
};

/// Bottom-up agglomerative clustering of candidates on cosine distance, stopped
/// at `clusters` groups. Returns one cluster label per candidate; labels are
/// dense and numbered by first appearance.
std::vector<std::size_t> cluster_candidates(std::span<const ConceptId> candidates, const Lexicon& lexicon,
                                            std::size_t clusters, Linkage linkage = Linkage::average);

/// Keeps the heaviest member of each of min(k, n) clusters, ordered by
/// descending weight (ties by ascending id).
std::vector<ConceptId> diversify(std::span<const std::pair<ConceptId, double>> candidates, const Lexicon& lexicon,
                                 std::size_t k, Linkage linkage = Linkage::average);

ProposalSet propose(const Lexicon& lexicon, const ConceptGraph& graph, ConceptId anchor,
                    const ProposalConfig& config = {});

struct ClassifyThresholds {
    double similar = 0.55;
    // Quantile of the source's positive out-weights a related edge must reach.
    double related_quantile = 0.8;
};

ActionType classify_transition(const Lexicon& lexicon, const ConceptGraph& graph, ConceptId from, ConceptId to,
                               const ClassifyThresholds& thresholds = {});

/// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

}  // namespace mindle
