#include "mindle/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace mindle {

std::string_view to_string(ActionType type) {
    switch (type) {
    case ActionType::similar: return "similar";
    case ActionType::related: return "related";
    case ActionType::unrelated: return "unrelated";
    }
    return "unknown";
}

std::optional<ActionType> parse_action_type(std::string_view text) {
    if (text == "similar") return ActionType::similar;
    if (text == "related") return ActionType::related;
    if (text == "unrelated") return ActionType::unrelated;
    return std::nullopt;
}

std::optional<ActionType> ProposalSet::type_of(ConceptId c) const {
    auto in = [c](const std::vector<ConceptId>& v) { return std::find(v.begin(), v.end(), c) != v.end(); };
    if (in(similar)) return ActionType::similar;
    if (in(related)) return ActionType::related;
    if (in(unrelated)) return ActionType::unrelated;
    return std::nullopt;
}

std::vector<std::size_t> cluster_candidates(std::span<const ConceptId> candidates, const Lexicon& lexicon,
                                            std::size_t clusters, Linkage linkage) {
    const std::size_t n = candidates.size();
    if (clusters == 0) throw std::invalid_argument("cluster count must be at least 1");

    // Lance-Williams over a dense distance matrix. Ward runs on squared
    // Euclidean distance between unit vectors, which is 2 * (1 - cos).
    const double scale = linkage == Linkage::ward ? 2.0 : 1.0;
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = scale * (1.0 - lexicon.similarity(candidates[i], candidates[j]));
            dist[i * n + j] = dist[j * n + i] = d;
        }
    }

    std::vector<std::size_t> parent(n);
    std::vector<std::size_t> size(n, 1);
    std::vector<bool> active(n, true);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;

    std::size_t remaining = n;
    while (remaining > clusters) {
        std::size_t best_i = n;
        std::size_t best_j = n;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                if (dist[i * n + j] < best) {
                    best = dist[i * n + j];
                    best_i = i;
                    best_j = j;
                }
            }
        }

        const double ni = static_cast<double>(size[best_i]);
        const double nj = static_cast<double>(size[best_j]);
        const double dij = dist[best_i * n + best_j];
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == best_i || k == best_j) continue;
            const double dki = dist[k * n + best_i];
            const double dkj = dist[k * n + best_j];
            const double nk = static_cast<double>(size[k]);
            double merged = 0.0;
            switch (linkage) {
            case Linkage::average: merged = (ni * dki + nj * dkj) / (ni + nj); break;
            case Linkage::single: merged = std::min(dki, dkj); break;
            case Linkage::complete: merged = std::max(dki, dkj); break;
            case Linkage::ward: merged = ((nk + ni) * dki + (nk + nj) * dkj - nk * dij) / (nk + ni + nj); break;
            }
            dist[k * n + best_i] = dist[best_i * n + k] = merged;
        }
        size[best_i] += size[best_j];
        active[best_j] = false;
        for (auto& p : parent) {
            if (p == best_j) p = best_i;
        }
        --remaining;
    }

    std::vector<std::size_t> labels(n);
    std::unordered_map<std::size_t, std::size_t> dense;
    for (std::size_t i = 0; i < n; ++i) {
        auto [it, inserted] = dense.emplace(parent[i], dense.size());
        labels[i] = it->second;
    }
    return labels;
}

std::vector<ConceptId> diversify(std::span<const std::pair<ConceptId, double>> candidates, const Lexicon& lexicon,
                                 std::size_t k, Linkage linkage) {
    if (k == 0) throw std::invalid_argument("diversify requires K >= 1");

    std::vector<std::pair<ConceptId, double>> unique;
    for (const auto& cand : candidates) {
        auto it = std::find_if(unique.begin(), unique.end(), [&](const auto& u) { return u.first == cand.first; });
        if (it == unique.end()) {
            unique.push_back(cand);
        } else {
            it->second = std::max(it->second, cand.second);
        }
    }
    if (unique.empty()) return {};

    std::vector<ConceptId> ids;
    ids.reserve(unique.size());
    for (const auto& u : unique) ids.push_back(u.first);
    const auto labels = cluster_candidates(ids, lexicon, std::min(k, unique.size()), linkage);

    auto heavier = [](const std::pair<ConceptId, double>& x, const std::pair<ConceptId, double>& y) {
        return x.second != y.second ? x.second > y.second : x.first < y.first;
    };
    const std::size_t cluster_count = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::optional<std::pair<ConceptId, double>>> picked(cluster_count);
    for (std::size_t i = 0; i < unique.size(); ++i) {
        auto& slot = picked[labels[i]];
        if (!slot || heavier(unique[i], *slot)) slot = unique[i];
    }

    std::vector<std::pair<ConceptId, double>> chosen;
    for (const auto& p : picked) chosen.push_back(*p);
    std::sort(chosen.begin(), chosen.end(), heavier);
    std::vector<ConceptId> out;
    for (const auto& c : chosen) out.push_back(c.first);
    return out;
}

ProposalSet propose(const Lexicon& lexicon, const ConceptGraph& graph, ConceptId anchor,
                    const ProposalConfig& config) {
    if (config.k == 0) throw std::invalid_argument("proposal K must be at least 1");
    if (config.overscan == 0) throw std::invalid_argument("proposal overscan must be at least 1");
    if (!lexicon.contains(anchor)) throw std::out_of_range("anchor not in lexicon");

    const std::size_t k = config.k;
    const std::size_t wide = k * config.overscan;

    ProposalSet set;
    set.anchor = anchor;
    set.k = k;

    const auto related_ranked = rank_related(graph, anchor, wide, RelatedDirection::most);
    std::unordered_set<ConceptId> related_pool;
    for (const auto& r : related_ranked) related_pool.insert(r.first);

    // Synonym filter: a similar candidate that is also strongly related is dropped.
    for (const auto& [c, cos] : lexicon.top_similar(anchor, wide)) {
        if (set.similar.size() >= k) break;
        if (!related_pool.contains(c)) set.similar.push_back(c);
    }

    set.related = diversify(related_ranked, lexicon, k, config.linkage);

    std::unordered_set<ConceptId> taken(set.similar.begin(), set.similar.end());
    taken.insert(set.related.begin(), set.related.end());

    if (graph.row_sum(anchor) <= 0.0) {
        set.isolated_fallback = true;
        std::vector<ConceptId> exclude(taken.begin(), taken.end());
        for (const auto& [c, cos] : lexicon.least_similar(anchor, k, exclude)) set.unrelated.push_back(c);
        return set;
    }

    for (const auto& [c, w] : rank_related(graph, anchor, k + taken.size(), RelatedDirection::least)) {
        if (set.unrelated.size() >= k) break;
        if (!taken.contains(c)) set.unrelated.push_back(c);
    }
    return set;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile must be in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ActionType classify_transition(const Lexicon& lexicon, const ConceptGraph& graph, ConceptId from, ConceptId to,
                               const ClassifyThresholds& thresholds) {
    if (from == to) throw std::invalid_argument("classify_transition requires from != to");
    if (lexicon.similarity(from, to) >= thresholds.similar) return ActionType::similar;

    const double w = graph.weight(from, to);
    if (w > 0.0) {
        std::vector<double> weights;
        for (const auto& e : graph.out_edges(from)) weights.push_back(e.weight);
        if (w >= quantile(std::move(weights), thresholds.related_quantile)) return ActionType::related;
    }
    return ActionType::unrelated;
}

}  // namespace mindle
