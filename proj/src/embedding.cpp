#include "rsc/embedding.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace rsc {

const char* to_string(InferenceMode mode) {
    switch (mode) {
        case InferenceMode::AdditiveL1: return "additive";
        case InferenceMode::LinearL2: return "linear";
        case InferenceMode::Multiplicative: return "multiplicative";
        case InferenceMode::General: return "general";
    }
    return "?";
}

InferenceMode parse_inference_mode(const std::string& name) {
    if (name == "additive") return InferenceMode::AdditiveL1;
    if (name == "linear") return InferenceMode::LinearL2;
    if (name == "multiplicative") return InferenceMode::Multiplicative;
    if (name == "general") return InferenceMode::General;
    throw std::invalid_argument("unknown inference mode: " + name);
}

namespace {

void fill_uniform_rows(Matrix& m, std::size_t first_row, std::mt19937_64& rng) {
    double bound = 6.0 / std::sqrt(double(m.cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t i = first_row; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = dist(rng);
}

void normalize_row(double* row, std::size_t dim) {
    double sq = 0;
    for (std::size_t j = 0; j < dim; ++j) sq += row[j] * row[j];
    if (sq == 0.0) {
        row[0] = 1.0;
        return;
    }
    double inv = 1.0 / std::sqrt(sq);
    for (std::size_t j = 0; j < dim; ++j) row[j] *= inv;
}

void check_dims(const InferenceConfig&, std::span<const double> h, std::span<const double> r,
                std::span<const double> t) {
    if (h.size() != r.size() || r.size() != t.size() || h.empty())
        throw std::invalid_argument("score: embedding dimension mismatch");
    for (std::size_t j = 0; j < h.size(); ++j)
        if (!std::isfinite(h[j]) || !std::isfinite(r[j]) || !std::isfinite(t[j]))
            throw std::domain_error("score: non-finite embedding coordinate");
}

}  // namespace

EmbeddingModel init_model(std::size_t n_entities, std::size_t n_relations, std::size_t dim,
                          std::uint64_t seed, InferenceConfig config) {
    if (n_entities == 0 || n_relations == 0 || dim == 0)
        throw std::invalid_argument("init_model: counts and dim must be positive");
    EmbeddingModel model;
    model.dim = dim;
    model.config = config;
    model.entity_table = Matrix(n_entities, dim);
    model.relation_table = Matrix(n_relations, dim);
    std::mt19937_64 rng(seed);
    fill_uniform_rows(model.entity_table, 0, rng);
    fill_uniform_rows(model.relation_table, 0, rng);
    normalize_entities(model);
    return model;
}

double score(const InferenceConfig& cfg, std::span<const double> h, std::span<const double> r,
             std::span<const double> t) {
    check_dims(cfg, h, r, t);
    std::size_t d = h.size();
    switch (cfg.mode) {
        case InferenceMode::AdditiveL1: {
            double s = 0;
            for (std::size_t j = 0; j < d; ++j) s += std::fabs(h[j] + r[j] - t[j]);
            return s;
        }
        case InferenceMode::LinearL2: {
            double s = 0;
            for (std::size_t j = 0; j < d; ++j) {
                double u = h[j] + r[j] - t[j];
                s += u * u;
            }
            return s;
        }
        case InferenceMode::Multiplicative: {
            double s = 0;
            for (std::size_t j = 0; j < d; ++j) s += h[j] * r[j] * t[j];
            return -s;
        }
        case InferenceMode::General: {
            const auto& k = cfg.constants;
            double sum_h = 0, sum_r = 0, sum_t = 0, rh = 0, rt = 0, ht = 0, hrt = 0;
            for (std::size_t j = 0; j < d; ++j) {
                sum_h += h[j];
                sum_r += r[j];
                sum_t += t[j];
                rh += r[j] * h[j];
                rt += r[j] * t[j];
                ht += h[j] * t[j];
                hrt += h[j] * r[j] * t[j];
            }
            return k.add_head * sum_h + k.add_rel * sum_r + k.add_tail * sum_t + k.add_bias +
                   k.lin_rel_head * rh + k.lin_rel_tail * rt + k.lin_head_tail * ht + k.lin_bias +
                   k.mul_weight * hrt + k.mul_bias;
        }
    }
    throw std::logic_error("score: bad mode");
}

double score(const EmbeddingModel& model, const TripletEmbedding& te) {
    return score(model.config, te.head, te.rel, te.tail);
}

double score(const EmbeddingModel& model, const Triplet& t) {
    return score(model.config, model.entity(t.head), model.relation(t.relation),
                 model.entity(t.tail));
}

ScoreGradients score_gradients(const InferenceConfig& cfg, std::span<const double> h,
                               std::span<const double> r, std::span<const double> t) {
    check_dims(cfg, h, r, t);
    std::size_t d = h.size();
    ScoreGradients g;
    g.head.assign(d, 0.0);
    g.rel.assign(d, 0.0);
    g.tail.assign(d, 0.0);
    switch (cfg.mode) {
        case InferenceMode::AdditiveL1:
            // subgradient 0 at the kink
            for (std::size_t j = 0; j < d; ++j) {
                double u = h[j] + r[j] - t[j];
                double s = (u > 0) - (u < 0);
                g.head[j] = s;
                g.rel[j] = s;
                g.tail[j] = -s;
            }
            break;
        case InferenceMode::LinearL2:
            for (std::size_t j = 0; j < d; ++j) {
                double u = 2.0 * (h[j] + r[j] - t[j]);
                g.head[j] = u;
                g.rel[j] = u;
                g.tail[j] = -u;
            }
            break;
        case InferenceMode::Multiplicative:
            for (std::size_t j = 0; j < d; ++j) {
                g.head[j] = -r[j] * t[j];
                g.rel[j] = -h[j] * t[j];
                g.tail[j] = -h[j] * r[j];
            }
            break;
        case InferenceMode::General: {
            const auto& k = cfg.constants;
            for (std::size_t j = 0; j < d; ++j) {
                g.head[j] = k.add_head + k.lin_rel_head * r[j] + k.lin_head_tail * t[j] +
                            k.mul_weight * r[j] * t[j];
                g.rel[j] = k.add_rel + k.lin_rel_head * h[j] + k.lin_rel_tail * t[j] +
                           k.mul_weight * h[j] * t[j];
                g.tail[j] = k.add_tail + k.lin_rel_tail * r[j] + k.lin_head_tail * h[j] +
                            k.mul_weight * h[j] * r[j];
            }
            break;
        }
    }
    return g;
}

ScoreGradients score_gradients(const EmbeddingModel& model, const TripletEmbedding& te) {
    return score_gradients(model.config, te.head, te.rel, te.tail);
}

void normalize_entities(EmbeddingModel& model) {
    for (std::size_t i = 0; i < model.entity_table.rows; ++i)
        normalize_row(model.entity_table.row(i), model.dim);
}

void grow_model(EmbeddingModel& model, std::size_t new_entities, std::size_t new_relations,
                std::uint64_t seed) {
    if (new_entities == 0 && new_relations == 0) return;
    std::mt19937_64 rng(seed);
    std::size_t old_e = model.entity_table.rows;
    model.entity_table.rows += new_entities;
    model.entity_table.data.resize(model.entity_table.rows * model.dim, 0.0);
    fill_uniform_rows(model.entity_table, old_e, rng);
    for (std::size_t i = old_e; i < model.entity_table.rows; ++i)
        normalize_row(model.entity_table.row(i), model.dim);

    std::size_t old_r = model.relation_table.rows;
    model.relation_table.rows += new_relations;
    model.relation_table.data.resize(model.relation_table.rows * model.dim, 0.0);
    fill_uniform_rows(model.relation_table, old_r, rng);
}

namespace {

constexpr char kMagic[4] = {'R', 'S', 'C', '1'};

void write_u64(std::ofstream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
    os.write(reinterpret_cast<char*>(b), 8);
}

std::uint64_t read_u64(std::ifstream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
}

void write_f64(std::ofstream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_u64(os, bits);
}

double read_f64(std::ifstream& is) {
    std::uint64_t bits = read_u64(is);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void write_table_f32(std::ofstream& os, const Matrix& m) {
    std::vector<float> buf(m.data.begin(), m.data.end());
    os.write(reinterpret_cast<const char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

void read_table_f32(std::ifstream& is, Matrix& m) {
    std::vector<float> buf(m.rows * m.cols);
    is.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    m.data.assign(buf.begin(), buf.end());
}

}  // namespace

void save_checkpoint(const EmbeddingModel& model, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os.write(kMagic, 4);
    write_u64(os, model.n_entities());
    write_u64(os, model.n_relations());
    write_u64(os, model.dim);
    write_table_f32(os, model.entity_table);
    write_table_f32(os, model.relation_table);
    char mode = static_cast<char>(model.config.mode);
    os.write(&mode, 1);
    const auto& k = model.config.constants;
    for (double v : {k.add_head, k.add_rel, k.add_tail, k.add_bias, k.lin_rel_head, k.lin_rel_tail,
                     k.lin_head_tail, k.lin_bias, k.mul_weight, k.mul_bias})
        write_f64(os, v);
    if (!os) throw std::runtime_error("write failed: " + path);
}

EmbeddingModel load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error(path + ": not a checkpoint file");
    EmbeddingModel model;
    std::uint64_t ne = read_u64(is), nr = read_u64(is);
    model.dim = read_u64(is);
    model.entity_table = Matrix(ne, model.dim);
    model.relation_table = Matrix(nr, model.dim);
    read_table_f32(is, model.entity_table);
    read_table_f32(is, model.relation_table);
    char mode;
    is.read(&mode, 1);
    model.config.mode = static_cast<InferenceMode>(mode);
    auto& k = model.config.constants;
    for (double* v : {&k.add_head, &k.add_rel, &k.add_tail, &k.add_bias, &k.lin_rel_head,
                      &k.lin_rel_tail, &k.lin_head_tail, &k.lin_bias, &k.mul_weight, &k.mul_bias})
        *v = read_f64(is);
    if (!is) throw std::runtime_error(path + ": truncated checkpoint");
    return model;
}

}  // namespace rsc
