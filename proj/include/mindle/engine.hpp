#pragma once

#include <cstddef>
#include <memory>

#include "mindle/concept_graph.hpp"
#include "mindle/lexicon.hpp"
#include "mindle/proposals.hpp"

namespace mindle {

/// Everything a session or an analysis needs to score and propose. Built once,
/// then shared read-only.
struct Engine {
    Lexicon lexicon;
    ConceptGraph graph;
    NavigationGraph navigation;
    ProposalConfig proposals;
    ClassifyThresholds thresholds;

    static std::shared_ptr<const Engine> make(Lexicon lexicon, ConceptGraph graph, ProposalConfig proposals = {},
                                              ClassifyThresholds thresholds = {}) {
        auto engine = std::make_shared<Engine>(Engine{std::move(lexicon), std::move(graph), {}, proposals, thresholds});
        engine->navigation = prune(engine->graph, engine->lexicon, proposals.k);
        return engine;
    }
};

}  // namespace mindle
