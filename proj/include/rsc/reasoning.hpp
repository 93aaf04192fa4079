#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rsc/embedding.hpp"
#include "rsc/kg.hpp"

namespace rsc {

struct CompletionResult {
    Triplet completed{};
    double score = 0;
    // ascending by score; front() == completed
    std::vector<std::pair<Triplet, double>> ranked_candidates;
};

struct RankingReport {
    double hits_at_1 = 0;
    double hits_at_10 = 0;
    double mean_rank = 0;
    std::size_t n_queries = 0;
};

enum class MaskPolicy { Head, Tail, BothAlternating };

// Fills the missing slot(s) of the query by exhaustive argmin of the
// inference function over the graph's vocabulary (full cross product when
// two slots are missing). Ties break toward the lowest entity id, then the
// lowest relation id.
CompletionResult complete(const EmbeddingModel& model, const KnowledgeGraph& graph,
                          const PartialTriplet& query, std::size_t top_k = 1);

// Masks each test triplet per policy and scores the recovery of the masked
// entity: hits@1 is exact recovery under complete()'s tie-break. When
// `filtered`, candidates that form other known-true triplets are skipped.
RankingReport evaluate_completion(const EmbeddingModel& model, const KnowledgeGraph& graph,
                                  std::span<const Triplet> test, MaskPolicy mask,
                                  std::uint64_t seed, bool filtered = false,
                                  std::size_t n_threads = 0);

// Sum of the inference function over the set; empty set scores 0.
double graph_score(const EmbeddingModel& model, std::span<const Triplet> triplets);

// Signed semantic distance: graph_score(a) - graph_score(b).
double semantic_distance(const EmbeddingModel& model, std::span<const Triplet> a,
                         std::span<const Triplet> b);
double semantic_distance_abs(const EmbeddingModel& model, std::span<const Triplet> a,
                             std::span<const Triplet> b);

}  // namespace rsc
