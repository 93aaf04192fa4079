#include "rsc/reasoning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace rsc {

namespace {

// candidate ordering: score ascending, then lexicographic on ids
struct Candidate {
    Triplet t;
    double score;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.t.head != b.t.head) return a.t.head < b.t.head;
    if (a.t.relation != b.t.relation) return a.t.relation < b.t.relation;
    return a.t.tail < b.t.tail;
}

class TopK {
public:
    explicit TopK(std::size_t k) : k_(std::max<std::size_t>(k, 1)) {}

    void offer(const Candidate& c) {
        if (best_.size() < k_) {
            best_.push_back(c);
            std::push_heap(best_.begin(), best_.end(), better);  // max-heap on `better`
        } else if (better(c, best_.front())) {
            std::pop_heap(best_.begin(), best_.end(), better);
            best_.back() = c;
            std::push_heap(best_.begin(), best_.end(), better);
        }
    }

    std::vector<Candidate> sorted() {
        std::sort_heap(best_.begin(), best_.end(), better);
        return std::move(best_);
    }

private:
    std::size_t k_;
    std::vector<Candidate> best_;
};

}  // namespace

CompletionResult complete(const EmbeddingModel& model, const KnowledgeGraph& graph,
                          const PartialTriplet& query, std::size_t top_k) {
    if (!query.valid()) throw std::invalid_argument("complete: query must have 1 or 2 missing slots");
    const std::uint32_t ne = graph.n_entities();
    const std::uint32_t nr = graph.n_relations();
    if (ne == 0 || (!query.relation && nr == 0))
        throw std::runtime_error("complete: empty candidate vocabulary");
    if (model.n_entities() < ne || model.n_relations() < nr)
        throw std::invalid_argument("complete: model does not cover graph vocabulary");

    TopK top(top_k);
    auto heads = [&](auto&& fn) {
        if (query.head) fn(*query.head);
        else for (EntityId e = 0; e < ne; ++e) fn(e);
    };
    auto rels = [&](auto&& fn) {
        if (query.relation) fn(*query.relation);
        else for (RelationId r = 0; r < nr; ++r) fn(r);
    };
    auto tails = [&](auto&& fn) {
        if (query.tail) fn(*query.tail);
        else for (EntityId e = 0; e < ne; ++e) fn(e);
    };

    heads([&](EntityId h) {
        rels([&](RelationId r) {
            tails([&](EntityId t) {
                Triplet cand{h, r, t};
                top.offer({cand, score(model, cand)});
            });
        });
    });

    auto best = top.sorted();
    CompletionResult result;
    result.completed = best.front().t;
    result.score = best.front().score;
    result.ranked_candidates.reserve(best.size());
    for (const auto& c : best) result.ranked_candidates.emplace_back(c.t, c.score);
    return result;
}

namespace {

struct QueryStats {
    std::size_t rank = 0;  // 1-based rank of the true fill-in
};

// Rank of the ground truth among single-entity candidates under the same
// ordering complete() uses.
QueryStats rank_entity_query(const EmbeddingModel& model, const KnowledgeGraph& graph,
                             const Triplet& truth, bool mask_head, bool filtered,
                             const TripletSet* extra_known) {
    const std::uint32_t ne = graph.n_entities();
    Candidate true_cand{truth, score(model, truth)};
    std::size_t rank = 1;
    for (EntityId e = 0; e < ne; ++e) {
        Triplet cand = truth;
        (mask_head ? cand.head : cand.tail) = e;
        if (cand == truth) continue;
        if (filtered &&
            (graph.contains(cand) || (extra_known && extra_known->contains(cand))))
            continue;
        Candidate c{cand, score(model, cand)};
        if (better(c, true_cand)) ++rank;
    }
    return {rank};
}

}  // namespace

RankingReport evaluate_completion(const EmbeddingModel& model, const KnowledgeGraph& graph,
                                  std::span<const Triplet> test, MaskPolicy mask,
                                  std::uint64_t seed, bool filtered, std::size_t n_threads) {
    (void)seed;  // masking is policy-driven; the seed is recorded by callers
    if (test.empty()) throw std::invalid_argument("evaluate_completion: empty test set");

    TripletSet known;
    if (filtered)
        for (const auto& t : test) known.insert(t);

    if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, test.size());

    std::vector<std::size_t> ranks(test.size());
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            bool mask_head = (mask == MaskPolicy::Head) ||
                             (mask == MaskPolicy::BothAlternating && i % 2 == 0);
            ranks[i] = rank_entity_query(model, graph, test[i], mask_head, filtered,
                                         filtered ? &known : nullptr)
                           .rank;
        }
    };

    std::vector<std::thread> threads;
    std::size_t chunk = (test.size() + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
        std::size_t begin = t * chunk;
        std::size_t end = std::min(test.size(), begin + chunk);
        if (begin >= end) break;
        threads.emplace_back(worker, begin, end);
    }
    for (auto& th : threads) th.join();

    RankingReport report;
    report.n_queries = test.size();
    double rank_sum = 0;
    std::size_t h1 = 0, h10 = 0;
    for (std::size_t r : ranks) {
        rank_sum += double(r);
        if (r == 1) ++h1;
        if (r <= 10) ++h10;
    }
    report.hits_at_1 = double(h1) / double(test.size());
    report.hits_at_10 = double(h10) / double(test.size());
    report.mean_rank = rank_sum / double(test.size());
    return report;
}

double graph_score(const EmbeddingModel& model, std::span<const Triplet> triplets) {
    double sum = 0;
    for (const auto& t : triplets) sum += score(model, t);
    return sum;
}

double semantic_distance(const EmbeddingModel& model, std::span<const Triplet> a,
                         std::span<const Triplet> b) {
    return graph_score(model, a) - graph_score(model, b);
}

double semantic_distance_abs(const EmbeddingModel& model, std::span<const Triplet> a,
                             std::span<const Triplet> b) {
    return std::fabs(semantic_distance(model, a, b));
}

}  // namespace rsc
