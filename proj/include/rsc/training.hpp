#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rsc/embedding.hpp"
#include "rsc/kg.hpp"

namespace rsc {

struct TrainingSets {
    std::vector<Triplet> positives;
    std::vector<Triplet> negatives;
};

// Hinge margin per (positive-label, negative-label) class pair; unlisted
// pairs fall back to the default.
struct MarginSchedule {
    double default_margin = 1.0;
    std::map<std::pair<std::string, std::string>, double> ranked;

    double margin() const { return default_margin; }
    double margin(const std::string& pos_label, const std::string& neg_label) const {
        auto it = ranked.find({pos_label, neg_label});
        return it == ranked.end() ? default_margin : it->second;
    }
};

struct TrainConfig {
    double learning_rate = 0.01;
    std::size_t batch_size = 128;
    std::size_t epochs = 1000;
    std::size_t negatives_per_positive = 1;
    double rel_loss_tolerance = 1e-4;
    std::size_t patience = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

// Corrupts head or tail (50/50) of each positive; rejects anything already
// observed in the graph. Throws after too many consecutive rejections.
std::vector<Triplet> sample_negatives(const KnowledgeGraph& graph,
                                      std::span<const Triplet> positives,
                                      std::size_t k_per_positive, std::uint64_t seed);
std::vector<Triplet> sample_negatives(const KnowledgeGraph& graph,
                                      std::span<const Triplet> positives,
                                      std::size_t k_per_positive, std::mt19937_64& rng);

// Exact double sum of max{0, f(pos) - f(neg) + margin} over the full
// positives x negatives product.
double hinge_loss(const EmbeddingModel& model, std::span<const Triplet> positives,
                  std::span<const Triplet> negatives, const MarginSchedule& margins);
double hinge_loss(const InferenceConfig& cfg, std::span<const TripletEmbedding> positives,
                  std::span<const TripletEmbedding> negatives, const MarginSchedule& margins);

// One pass over the positives in minibatches; each positive is paired with
// k freshly sampled negatives and a subgradient step is taken on every pair
// with positive hinge. Entities are renormalized at epoch end. Returns the
// mean per-pair hinge over the epoch.
double sgd_epoch(EmbeddingModel& model, const KnowledgeGraph& graph,
                 std::span<const Triplet> positives, const TrainConfig& cfg,
                 const MarginSchedule& margins, std::mt19937_64& rng);

// True iff the last `patience` consecutive relative loss changes are all
// below cfg.rel_loss_tolerance.
bool has_converged(std::span<const double> loss_history, const TrainConfig& cfg);

struct TrainResult {
    std::vector<double> loss_history;
    bool converged = false;
    std::size_t epochs_run = 0;
};

// Runs sgd_epoch until convergence or the epoch cap. When log_csv is given,
// writes one "epoch,mean_pair_loss,wall_ms,mode" row per epoch.
TrainResult train(EmbeddingModel& model, const KnowledgeGraph& graph,
                  std::span<const Triplet> positives, const TrainConfig& cfg,
                  const MarginSchedule& margins, std::ostream* log_csv = nullptr);

}  // namespace rsc
