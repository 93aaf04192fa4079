#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "rsc/channel.hpp"
#include "rsc/embedding.hpp"
#include "rsc/kg.hpp"
#include "rsc/reasoning.hpp"
#include "rsc/training.hpp"

namespace rsc {

struct ExperimentSpec {
    std::string train_path;
    std::string test_path;
    std::string out_dir = ".";
    std::size_t dim = 50;
    TrainConfig train;
    MarginSchedule margins;
    QuantizationSpec quant{16, 1.0};  // 175 dims x 16 bits = the 2800-bit profile
    double snr_min = 0, snr_max = 20, snr_step = 2;
    std::size_t packets_per_point = 2000;
    std::vector<double> train_fractions = {0.10, 0.25, 0.50, 0.75, 1.0};
    std::uint64_t seed = 0;

    std::vector<double> snr_grid() const;
};

struct PerVsSnrResult {
    std::vector<double> snr_grid;
    // mode label ("none", "reasoning-additive", ...) -> PER per grid point
    std::map<std::string, std::vector<double>> per;
};

// Sweeps the SNR grid transmitting entity packets of triplets sampled from
// the graph; reasoning curves use the supplied trained models.
PerVsSnrResult run_per_vs_snr(const KnowledgeGraph& graph,
                              const std::vector<EmbeddingModel>& reasoning_models,
                              const ExperimentSpec& spec);

struct LossCurvesResult {
    // mode label -> per-epoch mean pair loss
    std::map<std::string, std::vector<double>> loss;
    std::map<std::string, bool> converged;
};

// Trains additive and linear models side by side with identical seeds and
// data order.
LossCurvesResult run_loss_curves(const KnowledgeGraph& graph, const ExperimentSpec& spec);

struct AccVsTrainsizeResult {
    std::vector<double> fractions;
    std::map<std::string, std::vector<double>> hits_at_1;
};

// Trains on nested subsets of the positive set and evaluates hits@1 on the
// test set with alternating head/tail masking.
AccVsTrainsizeResult run_acc_vs_trainsize(const Dataset& ds, const ExperimentSpec& spec);

struct ScatterPoint {
    std::string symbol;
    std::string category;
    double x = 0, y = 0;
};

struct CategoryScatterResult {
    std::vector<ScatterPoint> points;
    double mean_intra = 0;
    double mean_inter = 0;
    double separation = 0;  // mean_inter - mean_intra, in the full embedding space
};

// Projects the two categories' entity embeddings to 2D by principal
// components of the combined set (used directly when dim == 2).
CategoryScatterResult run_category_scatter(const EmbeddingModel& model,
                                           const KnowledgeGraph& graph,
                                           const std::string& mapping_path,
                                           const std::string& category_a,
                                           const std::string& category_b);

// Reads "symbol<TAB>category" lines.
std::map<std::string, std::string> load_category_mapping(const std::string& path);

// Principal-component projection of a set of vectors to 2D.
std::vector<std::array<double, 2>> pca_project_2d(const Matrix& rows);

// CSV/SVG export; every CSV starts with "# key=value" config comments.
void export_per_vs_snr(const PerVsSnrResult& r, const ExperimentSpec& spec,
                       const std::string& csv_path, const std::string& svg_path);
void export_loss_curves(const LossCurvesResult& r, const ExperimentSpec& spec,
                        const std::string& csv_path, const std::string& svg_path);
void export_acc_vs_trainsize(const AccVsTrainsizeResult& r, const ExperimentSpec& spec,
                             const std::string& csv_path, const std::string& svg_path);
void export_category_scatter(const CategoryScatterResult& r, const ExperimentSpec& spec,
                             const std::string& csv_path, const std::string& svg_path);

}  // namespace rsc
