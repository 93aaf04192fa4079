#include "rsc/session.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "rsc/rng.hpp"

namespace rsc {

SessionState init_session(std::uint64_t seed, const TrainConfig& cfg, InferenceConfig inference,
                          std::size_t embedding_dim) {
    cfg.validate();
    if (embedding_dim == 0) throw std::invalid_argument("init_session: embedding_dim must be > 0");
    SessionState state;
    state.seed = seed;
    state.train_cfg = cfg;
    state.inference = inference;
    state.embedding_dim = embedding_dim;
    state.model.dim = embedding_dim;
    state.model.config = inference;
    state.model.entity_table = Matrix(0, embedding_dim);
    state.model.relation_table = Matrix(0, embedding_dim);
    return state;
}

namespace {

void evict_negative(SessionState& state, const Triplet& now_positive, std::mt19937_64& rng) {
    if (!state.negative_index.erase(now_positive)) return;
    auto& negs = state.sets.negatives;
    negs.erase(std::find(negs.begin(), negs.end(), now_positive));
    auto replacement = sample_negatives(state.graph, std::span(&now_positive, 1), 1, rng);
    negs.push_back(replacement[0]);
    state.negative_index.insert(replacement[0]);
}

void retrain(SessionState& state, std::mt19937_64& rng) {
    if (state.sets.positives.empty() || state.model.n_entities() == 0 ||
        state.model.n_relations() == 0)
        return;
    if (state.cold_start) {
        state.model = init_model(state.model.n_entities(), state.model.n_relations(),
                                 state.embedding_dim, rng(), state.inference);
    }
    // The persistent negative set is generated once, then only maintained by
    // eviction/replacement as positives arrive.
    if (state.sets.negatives.empty()) {
        state.sets.negatives =
            sample_negatives(state.graph, state.sets.positives,
                             std::max<std::size_t>(1, state.train_cfg.negatives_per_positive), rng);
        for (const auto& n : state.sets.negatives) state.negative_index.insert(n);
    }
    TrainConfig cfg = state.train_cfg;
    cfg.seed = rng();
    train(state.model, state.graph, state.sets.positives, cfg, state.margins);
}

}  // namespace

SlotOutcome ingest_slot(SessionState& state, std::span<const SlotItem> batch,
                        const ChannelConfig& ch, const QuantizationSpec& spec) {
    ++state.t;
    std::mt19937_64 rng(mix64(state.seed ^ mix64(state.t)));
    SlotOutcome outcome;

    std::uint32_t ne0 = state.graph.n_entities();
    std::uint32_t nr0 = state.graph.n_relations();

    // (i) register complete triplets; present slots of partial triplets also
    // join the vocabulary (their labels are observed knowledge).
    for (const auto& item : batch) {
        if (item.is_partial()) {
            auto obs = item.observed();
            if (obs.head) state.graph.ensure_entity(*obs.head);
            if (obs.tail) state.graph.ensure_entity(*obs.tail);
            if (obs.relation) state.graph.ensure_relation(*obs.relation);
            continue;
        }
        if (state.graph.add(item.truth)) {
            ++outcome.new_triplets;
            state.sets.positives.push_back(item.truth);
            evict_negative(state, item.truth, rng);
        }
    }
    outcome.new_entities = state.graph.n_entities() - ne0;
    outcome.new_relations = state.graph.n_relations() - nr0;

    grow_model(state.model, state.graph.n_entities() - state.model.n_entities(),
               state.graph.n_relations() - state.model.n_relations(), rng());

    // (ii) retrain only when the slot brought anything new
    outcome.retrained =
        outcome.new_entities + outcome.new_relations + outcome.new_triplets > 0;
    if (outcome.retrained) retrain(state, rng);

    // (iii) channel transit of present-entity packets, then completion
    std::vector<Triplet> truth_set, recovered_set;
    for (const auto& item : batch) {
        truth_set.push_back(item.truth);
        if (!item.is_partial()) {
            recovered_set.push_back(item.truth);
            continue;
        }
        auto query = item.observed();
        if (query.head) transmit(make_packet(state.model, *query.head, spec), ch, state.packet_counter++);
        if (query.tail) transmit(make_packet(state.model, *query.tail, spec), ch, state.packet_counter++);
        auto result = complete(state.model, state.graph, query);
        if (result.completed == item.truth) ++outcome.completions_correct;
        recovered_set.push_back(result.completed);
        outcome.completions.push_back(std::move(result));
    }

    // (iv) slot distance between ground truth and the recovered message
    outcome.slot_distance = semantic_distance(state.model, truth_set, recovered_set);
    state.objective_history.push_back(outcome.slot_distance);
    return outcome;
}

SessionTrace run_session(SessionState& state, const MessageStream& stream,
                         const ChannelConfig& ch, const QuantizationSpec& spec) {
    SessionTrace trace;
    trace.slots.reserve(stream.slots.size());
    for (const auto& batch : stream.slots)
        trace.slots.push_back(ingest_slot(state, batch, ch, spec));
    return trace;
}

double loss_feedback(const SessionState& state, std::span<const TripletEmbedding> positives,
                     std::span<const TripletEmbedding> negatives) {
    return hinge_loss(state.inference, positives, negatives, state.margins);
}

void write_session_trace_csv(const SessionTrace& trace, std::ostream& os) {
    os << "slot,new_entities,new_relations,retrained,n_completions,completion_acc,slot_distance,"
          "cum_distance\n";
    double cum = 0;
    for (std::size_t i = 0; i < trace.slots.size(); ++i) {
        const auto& s = trace.slots[i];
        cum += s.slot_distance;
        double acc = s.completions.empty()
                         ? 0.0
                         : double(s.completions_correct) / double(s.completions.size());
        os << (i + 1) << ',' << s.new_entities << ',' << s.new_relations << ','
           << (s.retrained ? 1 : 0) << ',' << s.completions.size() << ',' << acc << ','
           << s.slot_distance << ',' << cum << '\n';
    }
}

}  // namespace rsc
