#include "rsc/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace rsc {

void TrainConfig::validate() const {
    // learning_rate 0 is allowed as an explicit zero-step diagnostic
    if (learning_rate < 0 || batch_size == 0 || epochs == 0 || patience == 0)
        throw std::invalid_argument("TrainConfig: fields must be positive");
    if (!(rel_loss_tolerance > 0 && rel_loss_tolerance < 1))
        throw std::invalid_argument("TrainConfig: rel_loss_tolerance outside (0,1)");
}

namespace {

constexpr int kMaxRetries = 1000;

Triplet corrupt_one(const KnowledgeGraph& graph, const Triplet& pos, std::mt19937_64& rng) {
    std::uniform_int_distribution<EntityId> pick_entity(0, graph.n_entities() - 1);
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        Triplet neg = pos;
        if (rng() & 1)
            neg.head = pick_entity(rng);
        else
            neg.tail = pick_entity(rng);
        if (neg != pos && !graph.contains(neg)) return neg;
    }
    throw std::runtime_error("sample_negatives: no unobserved corruption found");
}

}  // namespace

std::vector<Triplet> sample_negatives(const KnowledgeGraph& graph,
                                      std::span<const Triplet> positives,
                                      std::size_t k_per_positive, std::mt19937_64& rng) {
    if (graph.n_entities() == 0) throw std::invalid_argument("sample_negatives: empty graph");
    std::vector<Triplet> out;
    out.reserve(positives.size() * k_per_positive);
    for (const auto& pos : positives)
        for (std::size_t k = 0; k < k_per_positive; ++k)
            out.push_back(corrupt_one(graph, pos, rng));
    return out;
}

std::vector<Triplet> sample_negatives(const KnowledgeGraph& graph,
                                      std::span<const Triplet> positives,
                                      std::size_t k_per_positive, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_negatives(graph, positives, k_per_positive, rng);
}

double hinge_loss(const EmbeddingModel& model, std::span<const Triplet> positives,
                  std::span<const Triplet> negatives, const MarginSchedule& margins) {
    if (positives.empty() || negatives.empty())
        throw std::invalid_argument("hinge_loss: empty set");
    std::vector<double> neg_scores;
    neg_scores.reserve(negatives.size());
    for (const auto& n : negatives) neg_scores.push_back(score(model, n));
    double loss = 0;
    double c = margins.margin();
    for (const auto& p : positives) {
        double fp = score(model, p);
        for (double fn : neg_scores) loss += std::max(0.0, fp - fn + c);
    }
    return loss;
}

double hinge_loss(const InferenceConfig& cfg, std::span<const TripletEmbedding> positives,
                  std::span<const TripletEmbedding> negatives, const MarginSchedule& margins) {
    if (positives.empty() || negatives.empty())
        throw std::invalid_argument("hinge_loss: empty set");
    std::vector<double> neg_scores;
    neg_scores.reserve(negatives.size());
    for (const auto& n : negatives) neg_scores.push_back(score(cfg, n.head, n.rel, n.tail));
    double loss = 0;
    double c = margins.margin();
    for (const auto& p : positives) {
        double fp = score(cfg, p.head, p.rel, p.tail);
        for (double fn : neg_scores) loss += std::max(0.0, fp - fn + c);
    }
    return loss;
}

double sgd_epoch(EmbeddingModel& model, const KnowledgeGraph& graph,
                 std::span<const Triplet> positives, const TrainConfig& cfg,
                 const MarginSchedule& margins, std::mt19937_64& rng) {
    cfg.validate();
    if (positives.empty()) throw std::invalid_argument("sgd_epoch: no positives");

    std::vector<std::size_t> order(positives.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    const double lr = cfg.learning_rate;
    const double c = margins.margin();
    const std::size_t d = model.dim;
    double loss_sum = 0;
    std::size_t pairs = 0;
    std::size_t batch_index = 0;

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
        std::size_t end = std::min(order.size(), start + cfg.batch_size);
        try {
            for (std::size_t i = start; i < end; ++i) {
                const Triplet& pos = positives[order[i]];
                for (std::size_t k = 0; k < cfg.negatives_per_positive; ++k) {
                    Triplet neg = corrupt_one(graph, pos, rng);
                    double fp = score(model, pos);
                    double fn = score(model, neg);
                    double hinge = fp - fn + c;
                    loss_sum += std::max(0.0, hinge);
                    ++pairs;
                    if (hinge <= 0) continue;

                    auto gp = score_gradients(model.config, model.entity(pos.head),
                                              model.relation(pos.relation), model.entity(pos.tail));
                    auto gn = score_gradients(model.config, model.entity(neg.head),
                                              model.relation(neg.relation), model.entity(neg.tail));
                    double* ph = model.entity_table.row(pos.head);
                    double* pr = model.relation_table.row(pos.relation);
                    double* pt = model.entity_table.row(pos.tail);
                    for (std::size_t j = 0; j < d; ++j) {
                        ph[j] -= lr * gp.head[j];
                        pr[j] -= lr * gp.rel[j];
                        pt[j] -= lr * gp.tail[j];
                    }
                    double* nh = model.entity_table.row(neg.head);
                    double* nr = model.relation_table.row(neg.relation);
                    double* nt = model.entity_table.row(neg.tail);
                    for (std::size_t j = 0; j < d; ++j) {
                        nh[j] += lr * gn.head[j];
                        nr[j] += lr * gn.rel[j];
                        nt[j] += lr * gn.tail[j];
                    }
                }
            }
        } catch (const std::domain_error&) {
            throw std::runtime_error("sgd_epoch: loss diverged in batch " +
                                     std::to_string(batch_index));
        }
        if (!std::isfinite(loss_sum))
            throw std::runtime_error("sgd_epoch: loss diverged in batch " +
                                     std::to_string(batch_index));
    }

    normalize_entities(model);
    return pairs ? loss_sum / double(pairs) : 0.0;
}

bool has_converged(std::span<const double> loss_history, const TrainConfig& cfg) {
    if (loss_history.size() < cfg.patience) return false;
    constexpr double eps = 1e-12;
    std::size_t n_changes = std::min(cfg.patience, loss_history.size() - 1);
    for (std::size_t i = loss_history.size() - n_changes; i < loss_history.size(); ++i) {
        double prev = loss_history[i - 1];
        double change = std::fabs(loss_history[i] - prev) / std::max(prev, eps);
        if (change >= cfg.rel_loss_tolerance) return false;
    }
    return true;
}

TrainResult train(EmbeddingModel& model, const KnowledgeGraph& graph,
                  std::span<const Triplet> positives, const TrainConfig& cfg,
                  const MarginSchedule& margins, std::ostream* log_csv) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    TrainResult result;
    if (log_csv) *log_csv << "epoch,mean_pair_loss,wall_ms,mode\n";
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        double loss = sgd_epoch(model, graph, positives, cfg, margins, rng);
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        result.loss_history.push_back(loss);
        result.epochs_run = epoch;
        if (log_csv)
            *log_csv << epoch << ',' << loss << ',' << ms << ',' << to_string(model.config.mode)
                     << '\n';
        if (has_converged(result.loss_history, cfg)) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace rsc
