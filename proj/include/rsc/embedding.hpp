#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rsc/kg.hpp"

namespace rsc {

// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }
    std::span<double> row_span(std::size_t i) { return {row(i), cols}; }
    std::span<const double> row_span(std::size_t i) const { return {row(i), cols}; }
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

enum class InferenceMode : std::uint8_t {
    AdditiveL1 = 0,     // ||e_s + r - e_o||_1
    LinearL2 = 1,       // ||e_s + r - e_o||_2^2
    Multiplicative = 2, // -e_s^T diag(r) e_o
    General = 3,        // weighted sum of all three bases
};

const char* to_string(InferenceMode mode);
InferenceMode parse_inference_mode(const std::string& name);

// Weights of the generalized score, named by the basis they scale. Only
// consulted in General mode.
struct GeneralConstants {
    // additive basis, contracted against the all-ones covector
    double add_head = 0, add_rel = 0, add_tail = 0, add_bias = 0;
    // linear (inner-product) basis
    double lin_rel_head = 0, lin_rel_tail = 0, lin_head_tail = 0, lin_bias = 0;
    // multiplicative (trilinear-diagonal) basis
    double mul_weight = 0, mul_bias = 0;
};

struct InferenceConfig {
    InferenceMode mode = InferenceMode::AdditiveL1;
    GeneralConstants constants;
};

struct TripletEmbedding {
    std::vector<double> head, rel, tail;
};

struct ScoreGradients {
    std::vector<double> head, rel, tail;
};

// Entity and relation embedding tables sharing one space of dimension dim.
struct EmbeddingModel {
    std::size_t dim = 0;
    Matrix entity_table;
    Matrix relation_table;
    InferenceConfig config;

    std::size_t n_entities() const { return entity_table.rows; }
    std::size_t n_relations() const { return relation_table.rows; }
    std::span<const double> entity(EntityId e) const { return entity_table.row_span(e); }
    std::span<const double> relation(RelationId r) const { return relation_table.row_span(r); }
};

// Uniform init on [-6/sqrt(dim), 6/sqrt(dim)], entity rows L2-normalized.
EmbeddingModel init_model(std::size_t n_entities, std::size_t n_relations, std::size_t dim,
                          std::uint64_t seed, InferenceConfig config = {});

double score(const InferenceConfig& cfg, std::span<const double> head,
             std::span<const double> rel, std::span<const double> tail);
double score(const EmbeddingModel& model, const TripletEmbedding& te);
double score(const EmbeddingModel& model, const Triplet& t);

ScoreGradients score_gradients(const InferenceConfig& cfg, std::span<const double> head,
                               std::span<const double> rel, std::span<const double> tail);
ScoreGradients score_gradients(const EmbeddingModel& model, const TripletEmbedding& te);

// Rescales every entity row to unit L2 norm; a zero row becomes the first
// unit basis vector.
void normalize_entities(EmbeddingModel& model);

// Appends freshly initialized rows; existing rows are untouched.
void grow_model(EmbeddingModel& model, std::size_t new_entities, std::size_t new_relations,
                std::uint64_t seed);

// Checkpoint: "RSC1", u64 counts (entities, relations, dim), f32 tables
// row-major, one mode byte, ten f64 constants. Little-endian throughout.
void save_checkpoint(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_checkpoint(const std::string& path);

}  // namespace rsc
