#include <doctest.h>

#include <cmath>
#include <random>

#include "rsc/embedding.hpp"
#include "test_util.hpp"

using namespace rsc;

namespace {

std::vector<double> random_vec(std::size_t d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1, 1);
    std::vector<double> v(d);
    for (auto& x : v) x = dist(rng);
    return v;
}

// central finite difference of the score in every coordinate
ScoreGradients fd_gradients(const InferenceConfig& cfg, std::vector<double> h,
                            std::vector<double> r, std::vector<double> t) {
    const double step = 1e-5;
    ScoreGradients g;
    auto diff = [&](std::vector<double>& v, std::vector<double>& out) {
        out.resize(v.size());
        for (std::size_t j = 0; j < v.size(); ++j) {
            double orig = v[j];
            v[j] = orig + step;
            double hi = score(cfg, h, r, t);
            v[j] = orig - step;
            double lo = score(cfg, h, r, t);
            v[j] = orig;
            out[j] = (hi - lo) / (2 * step);
        }
    };
    diff(h, g.head);
    diff(r, g.rel);
    diff(t, g.tail);
    return g;
}

double max_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double scale = std::max({std::fabs(a[j]), std::fabs(b[j]), 1.0});
        worst = std::max(worst, std::fabs(a[j] - b[j]) / scale);
    }
    return worst;
}

}  // namespace

TEST_CASE("init_model is deterministic and normalizes entity rows") {
    auto a = init_model(5, 3, 50, 123);
    auto b = init_model(5, 3, 50, 123);
    CHECK(a.entity_table.data == b.entity_table.data);
    CHECK(a.relation_table.data == b.relation_table.data);

    for (std::size_t i = 0; i < a.n_entities(); ++i) {
        double sq = 0;
        for (std::size_t j = 0; j < a.dim; ++j) sq += a.entity_table.at(i, j) * a.entity_table.at(i, j);
        CHECK(std::fabs(std::sqrt(sq) - 1.0) < 1e-6);
    }
}

TEST_CASE("init_model draws inside the +-6/sqrt(dim) bound") {
    auto m = init_model(3, 4, 2, 7);
    double bound = 6.0 / std::sqrt(2.0) + 1e-12;
    CHECK(m.entity_table.rows == 3);
    CHECK(m.relation_table.rows == 4);
    CHECK(m.entity_table.cols == 2);
    // relation rows are not normalized, so the raw bound applies there
    for (double v : m.relation_table.data) CHECK(std::fabs(v) <= bound);
}

TEST_CASE("init_model rejects zero sizes") {
    CHECK_THROWS_AS(init_model(0, 1, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(init_model(1, 0, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(init_model(1, 1, 0, 0), std::invalid_argument);
}

TEST_CASE("additive score is zero at an exact translation") {
    InferenceConfig cfg{InferenceMode::AdditiveL1, {}};
    std::vector<double> h{0.3, -0.2, 0.5}, r{0.1, 0.1, -0.4};
    std::vector<double> t{0.4, -0.1, 0.1};
    CHECK(score(cfg, h, r, t) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("multiplicative score matches the desk evaluation") {
    InferenceConfig cfg{InferenceMode::Multiplicative, {}};
    std::vector<double> h{1, 2}, r{3, 4}, t{5, 6};
    CHECK(score(cfg, h, r, t) == doctest::Approx(-63.0));
}

TEST_CASE("linear score is the squared L2 norm of the residual") {
    InferenceConfig cfg{InferenceMode::LinearL2, {}};
    std::vector<double> h{1, 0}, r{0, 1}, t{0, 0};
    CHECK(score(cfg, h, r, t) == doctest::Approx(2.0));
}

TEST_CASE("score rejects mismatched and non-finite input") {
    InferenceConfig cfg{InferenceMode::AdditiveL1, {}};
    std::vector<double> a{1, 2}, b{1, 2, 3};
    CHECK_THROWS_AS(score(cfg, a, b, a), std::invalid_argument);
    std::vector<double> bad{1, std::nan("")};
    CHECK_THROWS_AS(score(cfg, a, a, bad), std::domain_error);
}

TEST_CASE("multiplicative gradients match the desk differentiation") {
    InferenceConfig cfg{InferenceMode::Multiplicative, {}};
    std::vector<double> h{1, 2}, r{3, 4}, t{5, 6};
    auto g = score_gradients(cfg, h, r, t);
    CHECK(g.head[0] == doctest::Approx(-15.0));
    CHECK(g.head[1] == doctest::Approx(-24.0));
}

TEST_CASE("additive subgradient is all ones for a positive residual") {
    InferenceConfig cfg{InferenceMode::AdditiveL1, {}};
    std::vector<double> h{1, 1}, r{1, 1}, t{0, 0};
    auto g = score_gradients(cfg, h, r, t);
    CHECK(g.head == std::vector<double>{1, 1});
    CHECK(g.rel == std::vector<double>{1, 1});
    CHECK(g.tail == std::vector<double>{-1, -1});
}

TEST_CASE("all modes pass the finite-difference gradient check at 100 points") {
    std::mt19937_64 rng(2024);
    GeneralConstants k{0.5, -0.3, 0.2, 1.0, 0.7, -0.6, 0.4, -1.0, 1.3, 0.1};
    std::vector<InferenceConfig> cfgs = {
        {InferenceMode::AdditiveL1, {}},
        {InferenceMode::LinearL2, {}},
        {InferenceMode::Multiplicative, {}},
        {InferenceMode::General, k},
    };
    for (const auto& cfg : cfgs) {
        for (int i = 0; i < 100; ++i) {
            auto h = random_vec(6, rng), r = random_vec(6, rng), t = random_vec(6, rng);
            auto analytic = score_gradients(cfg, h, r, t);
            auto numeric = fd_gradients(cfg, h, r, t);
            CHECK(max_rel_error(analytic.head, numeric.head) < 1e-4);
            CHECK(max_rel_error(analytic.rel, numeric.rel) < 1e-4);
            CHECK(max_rel_error(analytic.tail, numeric.tail) < 1e-4);
        }
    }
}

TEST_CASE("uniform offset constants cancel in score differences") {
    std::mt19937_64 rng(5);
    GeneralConstants k{0.5, -0.3, 0.2, 1.0, 0.7, -0.6, 0.4, -1.0, 1.3, 0.1};
    InferenceConfig base{InferenceMode::General, k};
    InferenceConfig shifted = base;
    shifted.constants.add_bias += 3.7;
    shifted.constants.lin_bias += -1.2;
    shifted.constants.mul_bias += 0.9;
    for (int i = 0; i < 20; ++i) {
        auto h1 = random_vec(4, rng), r1 = random_vec(4, rng), t1 = random_vec(4, rng);
        auto h2 = random_vec(4, rng), r2 = random_vec(4, rng), t2 = random_vec(4, rng);
        double d_base = score(base, h1, r1, t1) - score(base, h2, r2, t2);
        double d_shift = score(shifted, h1, r1, t1) - score(shifted, h2, r2, t2);
        CHECK(d_base == doctest::Approx(d_shift).epsilon(1e-9));
    }
}

TEST_CASE("multiplicative score is symmetric under head/tail swap") {
    InferenceConfig cfg{InferenceMode::Multiplicative, {}};
    std::mt19937_64 rng(9);
    for (int i = 0; i < 50; ++i) {
        auto h = random_vec(5, rng), r = random_vec(5, rng), t = random_vec(5, rng);
        CHECK(score(cfg, h, r, t) == doctest::Approx(score(cfg, t, r, h)));
    }
}

TEST_CASE("normalize_entities rescales, fixes, and backfills rows") {
    EmbeddingModel m;
    m.dim = 3;
    m.entity_table = Matrix(3, 3);
    m.relation_table = Matrix(1, 3);
    double* r0 = m.entity_table.row(0);
    r0[0] = 3;
    r0[1] = 4;
    double* r1 = m.entity_table.row(1);
    r1[0] = 1;  // already unit
    // row 2 stays zero
    normalize_entities(m);

    CHECK(m.entity_table.at(0, 0) == doctest::Approx(0.6));
    CHECK(m.entity_table.at(0, 1) == doctest::Approx(0.8));
    CHECK(m.entity_table.at(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.entity_table.at(2, 0) == doctest::Approx(1.0));
    CHECK(m.entity_table.at(2, 1) == doctest::Approx(0.0));
    CHECK(m.entity_table.at(2, 2) == doctest::Approx(0.0));
}

TEST_CASE("grow_model appends rows and leaves old rows bit-identical") {
    auto m = init_model(4, 2, 8, 31);
    auto before = m;
    grow_model(m, 0, 0, 99);
    CHECK(m.entity_table.data == before.entity_table.data);

    grow_model(m, 5, 1, 99);
    CHECK(m.n_entities() == 9);
    CHECK(m.n_relations() == 3);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            CHECK(m.entity_table.at(i, j) == before.entity_table.at(i, j));
    for (std::size_t j = 0; j < 8; ++j)
        CHECK(m.relation_table.at(0, j) == before.relation_table.at(0, j));

    // per-call determinism
    auto m2 = before;
    grow_model(m2, 5, 1, 99);
    CHECK(m2.entity_table.data == m.entity_table.data);
}

TEST_CASE("checkpoint round trip preserves tables, mode, and constants") {
    GeneralConstants k{0.5, -0.3, 0.2, 1.0, 0.7, -0.6, 0.4, -1.0, 1.3, 0.1};
    auto m = init_model(6, 2, 10, 77, InferenceConfig{InferenceMode::General, k});
    test::TempDir dir;
    save_checkpoint(m, dir.file("model.rsc"));
    auto loaded = load_checkpoint(dir.file("model.rsc"));

    CHECK(loaded.dim == m.dim);
    CHECK(loaded.config.mode == m.config.mode);
    CHECK(loaded.config.constants.mul_weight == doctest::Approx(1.3));
    CHECK(loaded.config.constants.lin_bias == doctest::Approx(-1.0));
    REQUIRE(loaded.entity_table.data.size() == m.entity_table.data.size());
    for (std::size_t i = 0; i < m.entity_table.data.size(); ++i)
        CHECK(loaded.entity_table.data[i] ==
              doctest::Approx(double(float(m.entity_table.data[i]))));  // stored as f32
}

TEST_CASE("load_checkpoint rejects junk") {
    test::TempDir dir;
    test::write_file(dir.file("junk"), "not a checkpoint");
    CHECK_THROWS_AS(load_checkpoint(dir.file("junk")), std::runtime_error);
}
