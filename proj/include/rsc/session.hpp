#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rsc/channel.hpp"
#include "rsc/embedding.hpp"
#include "rsc/kg.hpp"
#include "rsc/reasoning.hpp"
#include "rsc/training.hpp"

namespace rsc {

// Shared transmitter/receiver state of the life-long protocol. Strictly
// single-writer; slots are processed serially.
struct SessionState {
    std::size_t t = 0;  // time-slot counter
    KnowledgeGraph graph;
    TrainingSets sets;
    EmbeddingModel model;  // grown lazily; empty until the first symbols arrive
    MarginSchedule margins;
    TrainConfig train_cfg;
    InferenceConfig inference;
    std::size_t embedding_dim = 50;
    bool cold_start = false;  // retrain from scratch instead of warm start
    std::uint64_t seed = 0;
    std::vector<double> objective_history;  // per-slot semantic distances

    std::uint64_t packet_counter = 0;  // channel stream index, monotone
    TripletSet negative_index;
};

struct SlotOutcome {
    std::size_t new_entities = 0;
    std::size_t new_relations = 0;
    std::size_t new_triplets = 0;
    bool retrained = false;
    std::vector<CompletionResult> completions;
    std::size_t completions_correct = 0;
    double slot_distance = 0;
};

struct SessionTrace {
    std::vector<SlotOutcome> slots;
};

SessionState init_session(std::uint64_t seed, const TrainConfig& cfg,
                          InferenceConfig inference = {}, std::size_t embedding_dim = 50);

// One slot: registers complete triplets (growing vocabulary, model, and the
// positive set; evicting newly-positive triplets from the negative set),
// retrains iff the slot introduced anything new, then completes the slot's
// partial triplets after channel transit of their present-entity packets.
SlotOutcome ingest_slot(SessionState& state, std::span<const SlotItem> batch,
                        const ChannelConfig& ch, const QuantizationSpec& spec);

SessionTrace run_session(SessionState& state, const MessageStream& stream,
                         const ChannelConfig& ch, const QuantizationSpec& spec);

// Receiver-side loss on (possibly corrupted, dequantized) embeddings.
double loss_feedback(const SessionState& state, std::span<const TripletEmbedding> positives,
                     std::span<const TripletEmbedding> negatives);

// Writes "slot,new_entities,new_relations,retrained,n_completions,
// completion_acc,slot_distance,cum_distance" rows.
void write_session_trace_csv(const SessionTrace& trace, std::ostream& os);

}  // namespace rsc
