#include "rsc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rsc/rng.hpp"
#include "rsc/svg.hpp"

namespace rsc {

std::vector<double> ExperimentSpec::snr_grid() const {
    std::vector<double> grid;
    for (double s = snr_min; s <= snr_max + 1e-9; s += snr_step) grid.push_back(s);
    return grid;
}

PerVsSnrResult run_per_vs_snr(const KnowledgeGraph& graph,
                              const std::vector<EmbeddingModel>& reasoning_models,
                              const ExperimentSpec& spec) {
    if (reasoning_models.empty())
        throw std::invalid_argument("run_per_vs_snr: need at least one trained model");
    if (graph.size() == 0) throw std::invalid_argument("run_per_vs_snr: empty graph");

    PerVsSnrResult result;
    result.snr_grid = spec.snr_grid();
    std::size_t n_points = result.snr_grid.size();
    std::size_t n_triplets = (spec.packets_per_point + 1) / 2;

    result.per["none"].resize(n_points);
    for (const auto& m : reasoning_models)
        result.per["reasoning-" + std::string(to_string(m.config.mode))].resize(n_points);

    auto run_point = [&](std::size_t gi) {
        // triplets sampled with replacement, deterministically per grid point
        std::mt19937_64 rng(mix64(spec.seed ^ mix64(gi)));
        std::uniform_int_distribution<std::size_t> pick(0, graph.size() - 1);
        std::vector<Triplet> sample;
        sample.reserve(n_triplets);
        for (std::size_t i = 0; i < n_triplets; ++i) sample.push_back(graph.triplets()[pick(rng)]);

        ChannelConfig ch{result.snr_grid[gi], mix64(spec.seed) ^ gi};
        result.per["none"][gi] =
            transmit_and_recover(reasoning_models[0], graph, sample, ch, spec.quant,
                                 Recovery::None)
                .per;
        for (const auto& m : reasoning_models)
            result.per["reasoning-" + std::string(to_string(m.config.mode))][gi] =
                transmit_and_recover(m, graph, sample, ch, spec.quant, Recovery::Reasoning).per;
    };

    std::vector<std::thread> pool;
    for (std::size_t gi = 0; gi < n_points; ++gi) pool.emplace_back(run_point, gi);
    for (auto& t : pool) t.join();
    return result;
}

LossCurvesResult run_loss_curves(const KnowledgeGraph& graph, const ExperimentSpec& spec) {
    if (graph.size() == 0) throw std::invalid_argument("run_loss_curves: empty graph");
    LossCurvesResult result;
    for (auto mode : {InferenceMode::AdditiveL1, InferenceMode::LinearL2}) {
        auto model = init_model(graph.n_entities(), graph.n_relations(), spec.dim, spec.seed,
                                InferenceConfig{mode, {}});
        TrainConfig cfg = spec.train;
        cfg.seed = spec.seed;  // identical data order across modes
        try {
            auto tr = train(model, graph, graph.triplets(), cfg, spec.margins);
            result.loss[to_string(mode)] = std::move(tr.loss_history);
            result.converged[to_string(mode)] = tr.converged;
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("run_loss_curves: ") + to_string(mode) +
                                     " diverged: " + e.what());
        }
    }
    return result;
}

AccVsTrainsizeResult run_acc_vs_trainsize(const Dataset& ds, const ExperimentSpec& spec) {
    if (ds.graph.size() == 0 || ds.test.empty())
        throw std::invalid_argument("run_acc_vs_trainsize: empty dataset");
    AccVsTrainsizeResult result;
    result.fractions = spec.train_fractions;

    std::vector<Triplet> order = ds.graph.triplets();
    std::mt19937_64 rng(spec.seed);
    std::shuffle(order.begin(), order.end(), rng);

    for (double f : spec.train_fractions) {
        auto n = static_cast<std::size_t>(std::llround(f * double(order.size())));
        if (n == 0) throw std::invalid_argument("run_acc_vs_trainsize: empty training subset");
        std::span<const Triplet> subset(order.data(), n);  // nested prefixes
        for (auto mode : {InferenceMode::AdditiveL1, InferenceMode::LinearL2}) {
            auto model = init_model(ds.graph.n_entities(), ds.graph.n_relations(), spec.dim,
                                    spec.seed, InferenceConfig{mode, {}});
            TrainConfig cfg = spec.train;
            cfg.seed = spec.seed;
            train(model, ds.graph, subset, cfg, spec.margins);
            auto report = evaluate_completion(model, ds.graph, ds.test,
                                              MaskPolicy::BothAlternating, spec.seed);
            result.hits_at_1[to_string(mode)].push_back(report.hits_at_1);
        }
    }
    return result;
}

std::map<std::string, std::string> load_category_mapping(const std::string& path) {
    std::ifstream ifs(path);
    if (!ifs) throw std::runtime_error("cannot open " + path);
    std::map<std::string, std::string> mapping;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ifs, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected symbol<TAB>category");
        mapping[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return mapping;
}

std::vector<std::array<double, 2>> pca_project_2d(const Matrix& rows) {
    const std::size_t n = rows.rows, d = rows.cols;
    if (n == 0) return {};
    if (d == 2) {
        std::vector<std::array<double, 2>> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = {rows.at(i, 0), rows.at(i, 1)};
        return out;
    }

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += rows.at(i, j);
    for (double& m : mean) m /= double(n);

    Matrix centered(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) centered.at(i, j) = rows.at(i, j) - mean[j];

    Matrix cov(d, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < d; ++a) {
            double v = centered.at(i, a);
            if (v == 0.0) continue;
            for (std::size_t b = 0; b < d; ++b) cov.at(a, b) += v * centered.at(i, b);
        }
    double denom = n > 1 ? double(n - 1) : 1.0;
    for (double& v : cov.data) v /= denom;

    auto power_iterate = [&](const Matrix& m) {
        std::vector<double> v(d, 0.0);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> dist(-1, 1);
        for (auto& x : v) x = dist(rng);
        double lambda = 0;
        for (int iter = 0; iter < 500; ++iter) {
            std::vector<double> w(d, 0.0);
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b) w[a] += m.at(a, b) * v[b];
            double norm = 0;
            for (double x : w) norm += x * x;
            norm = std::sqrt(norm);
            if (norm == 0) break;
            for (std::size_t a = 0; a < d; ++a) v[a] = w[a] / norm;
            lambda = norm;
        }
        return std::pair(v, lambda);
    };

    auto [v1, l1] = power_iterate(cov);
    Matrix deflated = cov;
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) deflated.at(a, b) -= l1 * v1[a] * v1[b];
    auto [v2, l2] = power_iterate(deflated);
    (void)l2;

    std::vector<std::array<double, 2>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = 0, y = 0;
        for (std::size_t j = 0; j < d; ++j) {
            x += centered.at(i, j) * v1[j];
            y += centered.at(i, j) * v2[j];
        }
        out[i] = {x, y};
    }
    return out;
}

CategoryScatterResult run_category_scatter(const EmbeddingModel& model,
                                           const KnowledgeGraph& graph,
                                           const std::string& mapping_path,
                                           const std::string& category_a,
                                           const std::string& category_b) {
    auto mapping = load_category_mapping(mapping_path);

    std::vector<std::pair<std::string, EntityId>> members_a, members_b;
    for (const auto& [symbol, category] : mapping) {
        auto id = graph.entities().find(symbol);
        if (!id || *id >= model.n_entities()) continue;
        if (category == category_a) members_a.emplace_back(symbol, *id);
        else if (category == category_b) members_b.emplace_back(symbol, *id);
    }
    if (members_a.size() < 2 || members_b.size() < 2)
        throw std::invalid_argument("run_category_scatter: a category has < 2 members");

    const std::size_t na = members_a.size(), nb = members_b.size();
    Matrix rows(na + nb, model.dim);
    for (std::size_t i = 0; i < na; ++i)
        std::copy_n(model.entity(members_a[i].second).data(), model.dim, rows.row(i));
    for (std::size_t i = 0; i < nb; ++i)
        std::copy_n(model.entity(members_b[i].second).data(), model.dim, rows.row(na + i));

    auto projected = pca_project_2d(rows);

    CategoryScatterResult result;
    result.points.reserve(na + nb);
    for (std::size_t i = 0; i < na; ++i)
        result.points.push_back(
            {members_a[i].first, category_a, projected[i][0], projected[i][1]});
    for (std::size_t i = 0; i < nb; ++i)
        result.points.push_back(
            {members_b[i].first, category_b, projected[na + i][0], projected[na + i][1]});

    // separation statistic in the full embedding space
    auto dist = [&](std::size_t i, std::size_t j) {
        double sq = 0;
        for (std::size_t k = 0; k < model.dim; ++k) {
            double u = rows.at(i, k) - rows.at(j, k);
            sq += u * u;
        }
        return std::sqrt(sq);
    };
    double intra = 0, inter = 0;
    std::size_t n_intra = 0, n_inter = 0;
    for (std::size_t i = 0; i < na + nb; ++i)
        for (std::size_t j = i + 1; j < na + nb; ++j) {
            bool same = (i < na) == (j < na);
            if (same) {
                intra += dist(i, j);
                ++n_intra;
            } else {
                inter += dist(i, j);
                ++n_inter;
            }
        }
    result.mean_intra = n_intra ? intra / double(n_intra) : 0.0;
    result.mean_inter = n_inter ? inter / double(n_inter) : 0.0;
    result.separation = result.mean_inter - result.mean_intra;
    return result;
}

namespace {

void write_config_header(std::ofstream& os, const ExperimentSpec& spec) {
    os << "# seed=" << spec.seed << "\n# dim=" << spec.dim
       << "\n# learning_rate=" << spec.train.learning_rate
       << "\n# batch_size=" << spec.train.batch_size << "\n# epochs=" << spec.train.epochs
       << "\n# negatives_per_positive=" << spec.train.negatives_per_positive
       << "\n# rel_loss_tolerance=" << spec.train.rel_loss_tolerance
       << "\n# patience=" << spec.train.patience << "\n# margin=" << spec.margins.default_margin
       << "\n# bits_per_dim=" << spec.quant.bits_per_dim
       << "\n# clip_range=" << spec.quant.clip_range << "\n# snr_min=" << spec.snr_min
       << "\n# snr_max=" << spec.snr_max << "\n# snr_step=" << spec.snr_step
       << "\n# packets_per_point=" << spec.packets_per_point << "\n";
}

std::ofstream open_csv(const std::string& path, const ExperimentSpec& spec) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_config_header(os, spec);
    return os;
}

}  // namespace

void export_per_vs_snr(const PerVsSnrResult& r, const ExperimentSpec& spec,
                       const std::string& csv_path, const std::string& svg_path) {
    auto os = open_csv(csv_path, spec);
    os << "snr_db,mode,packets,errors,per,dim,bits_per_dim,seed\n";
    for (const auto& [mode, pers] : r.per)
        for (std::size_t i = 0; i < pers.size(); ++i) {
            auto packets = spec.packets_per_point + (spec.packets_per_point & 1);
            os << r.snr_grid[i] << ',' << mode << ',' << packets << ','
               << std::llround(pers[i] * double(packets)) << ',' << pers[i] << ',' << spec.dim
               << ',' << spec.quant.bits_per_dim << ',' << spec.seed << '\n';
        }

    std::vector<svg::Series> series;
    for (const auto& [mode, pers] : r.per)
        series.push_back({mode, "", r.snr_grid, pers});
    svg::ChartOptions opt;
    opt.title = "Packet error rate vs SNR";
    opt.x_label = "SNR (dB)";
    opt.y_label = "PER";
    svg::write_file(svg_path, svg::line_chart(series, opt));
}

void export_loss_curves(const LossCurvesResult& r, const ExperimentSpec& spec,
                        const std::string& csv_path, const std::string& svg_path) {
    auto os = open_csv(csv_path, spec);
    os << "epoch,mode,mean_pair_loss\n";
    for (const auto& [mode, losses] : r.loss)
        for (std::size_t i = 0; i < losses.size(); ++i)
            os << (i + 1) << ',' << mode << ',' << losses[i] << '\n';

    std::vector<svg::Series> series;
    for (const auto& [mode, losses] : r.loss) {
        std::vector<double> xs(losses.size());
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = double(i + 1);
        series.push_back({mode, "", xs, losses});
    }
    svg::ChartOptions opt;
    opt.title = "Training loss per iteration";
    opt.x_label = "iteration";
    opt.y_label = "mean pair loss";
    svg::write_file(svg_path, svg::line_chart(series, opt));
}

void export_acc_vs_trainsize(const AccVsTrainsizeResult& r, const ExperimentSpec& spec,
                             const std::string& csv_path, const std::string& svg_path) {
    auto os = open_csv(csv_path, spec);
    os << "train_fraction,mode,hits_at_1\n";
    for (const auto& [mode, accs] : r.hits_at_1)
        for (std::size_t i = 0; i < accs.size(); ++i)
            os << r.fractions[i] << ',' << mode << ',' << accs[i] << '\n';

    std::vector<svg::Series> series;
    for (const auto& [mode, accs] : r.hits_at_1)
        series.push_back({mode, "", r.fractions, accs});
    svg::ChartOptions opt;
    opt.title = "Recovery accuracy vs training-set size";
    opt.x_label = "fraction of training triplets";
    opt.y_label = "hits@1";
    svg::write_file(svg_path, svg::line_chart(series, opt));
}

void export_category_scatter(const CategoryScatterResult& r, const ExperimentSpec& spec,
                             const std::string& csv_path, const std::string& svg_path) {
    auto os = open_csv(csv_path, spec);
    os << "# mean_intra=" << r.mean_intra << "\n# mean_inter=" << r.mean_inter
       << "\n# separation=" << r.separation << "\n";
    os << "symbol,category,x,y\n";
    for (const auto& p : r.points)
        os << p.symbol << ',' << p.category << ',' << p.x << ',' << p.y << '\n';

    std::map<std::string, svg::Series> by_cat;
    for (const auto& p : r.points) {
        auto& s = by_cat[p.category];
        s.label = p.category;
        s.x.push_back(p.x);
        s.y.push_back(p.y);
    }
    std::vector<svg::Series> series;
    for (auto& [_, s] : by_cat) series.push_back(std::move(s));
    svg::ChartOptions opt;
    opt.title = "Entity embeddings by category (2D projection)";
    opt.x_label = "pc1";
    opt.y_label = "pc2";
    svg::write_file(svg_path, svg::scatter_chart(series, opt));
}

}  // namespace rsc
