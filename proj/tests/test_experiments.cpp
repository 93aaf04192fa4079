#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "rsc/experiments.hpp"
#include "test_util.hpp"

using namespace rsc;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream ifs(path);
    REQUIRE(ifs);
    std::ostringstream os;
    os << ifs.rdbuf();
    return os.str();
}

ExperimentSpec small_spec() {
    ExperimentSpec spec;
    spec.dim = 16;
    spec.train.learning_rate = 0.05;
    spec.train.epochs = 40;
    spec.train.rel_loss_tolerance = 1e-9;  // run every epoch
    spec.train.patience = 100;
    spec.seed = 3;
    return spec;
}

KnowledgeGraph pinned_graph() {
    KnowledgeGraph g;
    for (EntityId i = 0; i < 4; ++i) g.add(Triplet{2 * i, i, 2 * i + 1});
    return g;
}

EmbeddingModel overfit(const KnowledgeGraph& g, InferenceMode mode, std::uint64_t seed) {
    auto model = init_model(g.n_entities(), g.n_relations(), 16, seed, {mode, {}});
    TrainConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.epochs = 500;
    cfg.seed = seed;
    train(model, g, g.triplets(), cfg, MarginSchedule{});
    return model;
}

}  // namespace

TEST_CASE("snr_grid spans the configured range inclusively") {
    ExperimentSpec spec;
    auto grid = spec.snr_grid();
    REQUIRE(grid.size() == 11);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 20.0);

    spec.snr_min = -3;
    spec.snr_max = 3;
    spec.snr_step = 3;
    grid = spec.snr_grid();
    CHECK(grid == std::vector<double>{-3, 0, 3});
}

TEST_CASE("loss curves cover both modes with one row per epoch") {
    auto g = test::toy_graph();
    auto spec = small_spec();
    auto r = run_loss_curves(g, spec);

    REQUIRE(r.loss.count("additive"));
    REQUIRE(r.loss.count("linear"));
    CHECK(r.loss["additive"].size() == spec.train.epochs);
    CHECK(r.loss["linear"].size() == spec.train.epochs);
    for (const auto& [mode, losses] : r.loss)
        for (double v : losses) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0);
        }
    // both optimizers make headway on this graph
    CHECK(r.loss["additive"].back() < r.loss["additive"].front());
    CHECK(r.loss["linear"].back() < r.loss["linear"].front());

    KnowledgeGraph empty;
    CHECK_THROWS_AS(run_loss_curves(empty, spec), std::invalid_argument);
}

TEST_CASE("accuracy vs training size evaluates nested subsets") {
    Dataset ds;
    ds.graph = test::random_graph(15, 2, 40, 8);
    ds.test.assign(ds.graph.triplets().begin(), ds.graph.triplets().begin() + 10);

    auto spec = small_spec();
    spec.train.epochs = 20;
    spec.train_fractions = {0.5, 1.0};
    auto r = run_acc_vs_trainsize(ds, spec);

    CHECK(r.fractions == spec.train_fractions);
    REQUIRE(r.hits_at_1.count("additive"));
    REQUIRE(r.hits_at_1.count("linear"));
    for (const auto& [mode, accs] : r.hits_at_1) {
        REQUIRE(accs.size() == 2);
        for (double a : accs) {
            CHECK(a >= 0);
            CHECK(a <= 1);
        }
    }

    spec.train_fractions = {0.0};
    CHECK_THROWS_AS(run_acc_vs_trainsize(ds, spec), std::invalid_argument);
    Dataset empty;
    CHECK_THROWS_AS(run_acc_vs_trainsize(empty, small_spec()), std::invalid_argument);
}

TEST_CASE("per-vs-snr sweep: reasoning dominates and reruns are identical") {
    auto g = pinned_graph();
    std::vector<EmbeddingModel> models;
    models.push_back(overfit(g, InferenceMode::AdditiveL1, 12));

    auto spec = small_spec();
    spec.snr_min = -2;
    spec.snr_max = 6;
    spec.snr_step = 4;
    spec.packets_per_point = 400;

    auto a = run_per_vs_snr(g, models, spec);
    auto b = run_per_vs_snr(g, models, spec);

    REQUIRE(a.snr_grid.size() == 3);
    REQUIRE(a.per.count("none"));
    REQUIRE(a.per.count("reasoning-additive"));
    CHECK(a.per == b.per);  // threaded sweep is still deterministic

    for (std::size_t i = 0; i < a.snr_grid.size(); ++i) {
        double none = a.per.at("none")[i];
        double reasoned = a.per.at("reasoning-additive")[i];
        CHECK(none >= 0);
        CHECK(none <= 1);
        CHECK(reasoned <= none);
    }
    // the raw curve falls as the channel clears up
    CHECK(a.per.at("none").back() < a.per.at("none").front());

    CHECK_THROWS_AS(run_per_vs_snr(g, {}, spec), std::invalid_argument);
}

TEST_CASE("category mapping parses symbol/category pairs") {
    test::TempDir dir;
    test::write_file(dir.file("map.tsv"), "paris\tcity\naspirin\tdrug\nlondon\tcity\n");
    auto m = load_category_mapping(dir.file("map.tsv"));
    REQUIRE(m.size() == 3);
    CHECK(m["paris"] == "city");
    CHECK(m["aspirin"] == "drug");

    test::write_file(dir.file("bad.tsv"), "no-tab-here\n");
    CHECK_THROWS_AS(load_category_mapping(dir.file("bad.tsv")), std::runtime_error);
    CHECK_THROWS_AS(load_category_mapping(dir.file("missing.tsv")), std::runtime_error);
}

TEST_CASE("pca projection keeps the dominant direction in the first axis") {
    // points along (1,1,1,1) with small noise in an orthogonal direction
    Matrix rows(20, 4);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> d(-0.05, 0.05);
    for (std::size_t i = 0; i < rows.rows; ++i) {
        double t = double(i) - 10.0;
        double eps = d(rng);
        rows.at(i, 0) = t + eps;
        rows.at(i, 1) = t - eps;
        rows.at(i, 2) = t;
        rows.at(i, 3) = t;
    }
    auto proj = pca_project_2d(rows);
    REQUIRE(proj.size() == rows.rows);
    double var_x = 0, var_y = 0;
    for (const auto& p : proj) {
        var_x += p[0] * p[0];
        var_y += p[1] * p[1];
    }
    CHECK(var_x > 100.0 * var_y);

    // dim == 2 input passes through untouched
    Matrix flat(3, 2);
    flat.at(1, 0) = 0.5;
    flat.at(2, 1) = -0.25;
    auto same = pca_project_2d(flat);
    CHECK(same[1][0] == 0.5);
    CHECK(same[2][1] == -0.25);
}

TEST_CASE("category scatter separates antipodal clusters") {
    KnowledgeGraph g;
    for (int i = 0; i < 3; ++i) {
        g.entities().add("a" + std::to_string(i));
        g.entities().add("b" + std::to_string(i));
    }
    EmbeddingModel m;
    m.dim = 2;
    m.entity_table = Matrix(6, 2);
    m.relation_table = Matrix(1, 2);
    for (int i = 0; i < 3; ++i) {
        m.entity_table.row(2 * i)[0] = 1.0 + 0.01 * i;       // cluster a near (+1, 0)
        m.entity_table.row(2 * i + 1)[0] = -1.0 - 0.01 * i;  // cluster b near (-1, 0)
    }

    test::TempDir dir;
    test::write_file(dir.file("map.tsv"), "a0\tA\na1\tA\na2\tA\nb0\tB\nb1\tB\nb2\tB\n");
    auto r = run_category_scatter(m, g, dir.file("map.tsv"), "A", "B");

    CHECK(r.points.size() == 6);
    CHECK(r.mean_inter > r.mean_intra);
    CHECK(r.separation > 1.0);
    for (const auto& p : r.points) CHECK((p.category == "A" || p.category == "B"));

    // one-member category is rejected
    test::write_file(dir.file("thin.tsv"), "a0\tA\nb0\tB\nb1\tB\n");
    CHECK_THROWS_AS(run_category_scatter(m, g, dir.file("thin.tsv"), "A", "B"),
                    std::invalid_argument);
}

TEST_CASE("exports write config-stamped CSVs and well-formed SVGs") {
    auto g = test::toy_graph();
    auto spec = small_spec();
    spec.train.epochs = 10;
    auto r = run_loss_curves(g, spec);

    test::TempDir dir;
    export_loss_curves(r, spec, dir.file("loss.csv"), dir.file("loss.svg"));

    auto csv = slurp(dir.file("loss.csv"));
    CHECK(csv.rfind("# seed=3", 0) == 0);
    CHECK(csv.find("# dim=16") != std::string::npos);
    CHECK(csv.find("epoch,mode,mean_pair_loss") != std::string::npos);
    CHECK(csv.find("additive") != std::string::npos);
    CHECK(csv.find("linear") != std::string::npos);
    // 10 epochs x 2 modes data rows
    std::size_t rows = 0;
    std::istringstream is(csv);
    std::string line;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#' && line.find("epoch,") != 0) ++rows;
    CHECK(rows == 20);

    auto svg = slurp(dir.file("loss.svg"));
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.rfind("</svg>") != std::string::npos);
    CHECK(svg.find("additive") != std::string::npos);
}

TEST_CASE("per-vs-snr and scatter exports carry their own statistics") {
    auto g = pinned_graph();
    std::vector<EmbeddingModel> models;
    models.push_back(overfit(g, InferenceMode::AdditiveL1, 4));
    auto spec = small_spec();
    spec.snr_min = 0;
    spec.snr_max = 4;
    spec.snr_step = 4;
    spec.packets_per_point = 100;
    auto r = run_per_vs_snr(g, models, spec);

    test::TempDir dir;
    export_per_vs_snr(r, spec, dir.file("per.csv"), dir.file("per.svg"));
    auto csv = slurp(dir.file("per.csv"));
    CHECK(csv.find("snr_db,mode,packets,errors,per,dim,bits_per_dim,seed") != std::string::npos);
    CHECK(csv.find("reasoning-additive") != std::string::npos);
    CHECK(slurp(dir.file("per.svg")).find("</svg>") != std::string::npos);
}
