#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rsc {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Triplet {
    EntityId head{};
    RelationId relation{};
    EntityId tail{};

    friend bool operator==(const Triplet&, const Triplet&) = default;
    friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

struct TripletHash {
    std::size_t operator()(const Triplet& t) const noexcept {
        std::uint64_t k = (std::uint64_t(t.head) << 32) ^ (std::uint64_t(t.relation) << 16) ^ t.tail;
        k ^= k >> 33;
        k *= 0xff51afd7ed558ccdULL;
        k ^= k >> 33;
        return static_cast<std::size_t>(k);
    }
};

using TripletSet = std::unordered_set<Triplet, TripletHash>;

// A triplet with one or two slots unknown. Valid iff at least one slot is
// present and at least one is missing.
struct PartialTriplet {
    std::optional<EntityId> head;
    std::optional<RelationId> relation;
    std::optional<EntityId> tail;

    int present_count() const {
        return int(head.has_value()) + int(relation.has_value()) + int(tail.has_value());
    }
    int missing_count() const { return 3 - present_count(); }
    bool valid() const { return present_count() >= 1 && present_count() <= 2; }

    static PartialTriplet of(const Triplet& t) {
        return {t.head, t.relation, t.tail};
    }
};

// Symbol <-> id map. Ids are assigned in first-seen order and never change.
class Vocabulary {
public:
    // Registers the symbol if unseen; returns its id either way.
    std::uint32_t add(const std::string& symbol);
    std::optional<std::uint32_t> find(const std::string& symbol) const;
    const std::string& symbol(std::uint32_t id) const { return symbols_.at(id); }
    std::uint32_t size() const { return static_cast<std::uint32_t>(symbols_.size()); }
    const std::vector<std::string>& symbols() const { return symbols_; }

private:
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, std::uint32_t> ids_;
};

// Entity/relation vocabularies plus the observed triplet set. Vocabularies
// only grow; triplets are kept in insertion order with set semantics.
class KnowledgeGraph {
public:
    Vocabulary& entities() { return entities_; }
    const Vocabulary& entities() const { return entities_; }
    Vocabulary& relations() { return relations_; }
    const Vocabulary& relations() const { return relations_; }

    std::uint32_t n_entities() const { return entities_.size(); }
    std::uint32_t n_relations() const { return relations_.size(); }

    const std::vector<Triplet>& triplets() const { return triplets_; }
    std::size_t size() const { return triplets_.size(); }
    bool contains(const Triplet& t) const { return index_.contains(t); }

    // Inserts the triplet, auto-registering placeholder symbols for any id
    // beyond the current vocabulary (life-long growth). Returns false if it
    // was already present.
    bool add(const Triplet& t);

    // Symbol-level insertion; registers unseen symbols first.
    bool add(const std::string& head, const std::string& relation, const std::string& tail);

    // Grow the vocabularies (with placeholder symbols) until the id resolves,
    // without inserting any triplet.
    void ensure_entity(EntityId id);
    void ensure_relation(RelationId id);

private:
    Vocabulary entities_;
    Vocabulary relations_;
    std::vector<Triplet> triplets_;
    TripletSet index_;
};

// One element of a per-slot batch: the ground-truth triplet plus which slots
// the receiver sees blanked.
struct SlotItem {
    Triplet truth;
    bool mask_head = false;
    bool mask_relation = false;
    bool mask_tail = false;

    bool is_partial() const { return mask_head || mask_relation || mask_tail; }

    PartialTriplet observed() const {
        PartialTriplet p;
        if (!mask_head) p.head = truth.head;
        if (!mask_relation) p.relation = truth.relation;
        if (!mask_tail) p.tail = truth.tail;
        return p;
    }
};

struct MessageStream {
    std::vector<std::vector<SlotItem>> slots;
    std::uint64_t seed = 0;
};

struct Dataset {
    KnowledgeGraph graph;        // vocabulary over train+test, triplets from train
    std::vector<Triplet> test;
};

// Loads tab-separated "head<TAB>relation<TAB>tail" files. Throws
// std::runtime_error with the offending line number on malformed input.
Dataset load_dataset(const std::string& train_path, const std::string& test_path);

// Graph serialization: triplet file in the dataset format plus one sidecar
// vocabulary file per table (one symbol per line, line number = id).
void save_graph(const KnowledgeGraph& g, const std::string& triplet_path,
                const std::string& entity_vocab_path, const std::string& relation_vocab_path);
KnowledgeGraph load_graph(const std::string& triplet_path,
                          const std::string& entity_vocab_path,
                          const std::string& relation_vocab_path);

// Partitions the graph's triplets into `slots` batches and blanks
// `incomplete_fraction` of each batch (head or tail 50/50 by default;
// with mask_relations the relation slot joins the draw). Deterministic
// under seed.
MessageStream make_stream(const KnowledgeGraph& g, std::size_t slots,
                          double incomplete_fraction, std::uint64_t seed,
                          bool mask_relations = false);

}  // namespace rsc
