#include "rsc/kg.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rsc {

std::uint32_t Vocabulary::add(const std::string& symbol) {
    auto it = ids_.find(symbol);
    if (it != ids_.end()) return it->second;
    std::uint32_t id = size();
    symbols_.push_back(symbol);
    ids_.emplace(symbol, id);
    return id;
}

std::optional<std::uint32_t> Vocabulary::find(const std::string& symbol) const {
    auto it = ids_.find(symbol);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

void KnowledgeGraph::ensure_entity(EntityId id) {
    while (id >= entities_.size()) entities_.add("_e" + std::to_string(entities_.size()));
}

void KnowledgeGraph::ensure_relation(RelationId id) {
    while (id >= relations_.size()) relations_.add("_r" + std::to_string(relations_.size()));
}

bool KnowledgeGraph::add(const Triplet& t) {
    ensure_entity(t.head);
    ensure_entity(t.tail);
    ensure_relation(t.relation);
    if (!index_.insert(t).second) return false;
    triplets_.push_back(t);
    return true;
}

bool KnowledgeGraph::add(const std::string& head, const std::string& relation,
                         const std::string& tail) {
    Triplet t{entities_.add(head), relations_.add(relation), entities_.add(tail)};
    return add(t);
}

namespace {

struct RawTriplet {
    std::string head, relation, tail;
};

std::vector<RawTriplet> read_triplet_file(const std::string& path) {
    std::ifstream ifs(path);
    if (!ifs) throw std::runtime_error("cannot open " + path);
    std::vector<RawTriplet> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ifs, line)) {
        ++lineno;
        if (line.empty()) continue;
        RawTriplet t;
        std::size_t p1 = line.find('\t');
        std::size_t p2 = (p1 == std::string::npos) ? std::string::npos : line.find('\t', p1 + 1);
        if (p1 == std::string::npos || p2 == std::string::npos ||
            line.find('\t', p2 + 1) != std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 3 tab-separated fields");
        }
        t.head = line.substr(0, p1);
        t.relation = line.substr(p1 + 1, p2 - p1 - 1);
        t.tail = line.substr(p2 + 1);
        if (t.head.empty() || t.relation.empty() || t.tail.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty field");
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace

Dataset load_dataset(const std::string& train_path, const std::string& test_path) {
    auto train_raw = read_triplet_file(train_path);
    auto test_raw = read_triplet_file(test_path);

    Dataset ds;
    for (const auto& t : train_raw)
        ds.graph.add(t.head, t.relation, t.tail);
    // Test symbols join the vocabulary but the triplets stay out of the graph.
    auto& ents = ds.graph.entities();
    auto& rels = ds.graph.relations();
    ds.test.reserve(test_raw.size());
    for (const auto& t : test_raw)
        ds.test.push_back({ents.add(t.head), rels.add(t.relation), ents.add(t.tail)});
    return ds;
}

void save_graph(const KnowledgeGraph& g, const std::string& triplet_path,
                const std::string& entity_vocab_path, const std::string& relation_vocab_path) {
    std::ofstream tf(triplet_path);
    if (!tf) throw std::runtime_error("cannot write " + triplet_path);
    for (const auto& t : g.triplets())
        tf << g.entities().symbol(t.head) << '\t' << g.relations().symbol(t.relation) << '\t'
           << g.entities().symbol(t.tail) << '\n';

    std::ofstream ef(entity_vocab_path);
    if (!ef) throw std::runtime_error("cannot write " + entity_vocab_path);
    for (const auto& s : g.entities().symbols()) ef << s << '\n';

    std::ofstream rf(relation_vocab_path);
    if (!rf) throw std::runtime_error("cannot write " + relation_vocab_path);
    for (const auto& s : g.relations().symbols()) rf << s << '\n';
}

KnowledgeGraph load_graph(const std::string& triplet_path, const std::string& entity_vocab_path,
                          const std::string& relation_vocab_path) {
    KnowledgeGraph g;
    auto load_vocab = [](Vocabulary& v, const std::string& path) {
        std::ifstream ifs(path);
        if (!ifs) throw std::runtime_error("cannot open " + path);
        std::string line;
        while (std::getline(ifs, line))
            if (!line.empty()) v.add(line);
    };
    load_vocab(g.entities(), entity_vocab_path);
    load_vocab(g.relations(), relation_vocab_path);
    for (const auto& t : read_triplet_file(triplet_path)) {
        auto h = g.entities().find(t.head);
        auto r = g.relations().find(t.relation);
        auto o = g.entities().find(t.tail);
        if (!h || !r || !o)
            throw std::runtime_error("triplet symbol missing from vocabulary: " + t.head + " " +
                                     t.relation + " " + t.tail);
        g.add(Triplet{*h, *r, *o});
    }
    return g;
}

MessageStream make_stream(const KnowledgeGraph& g, std::size_t slots, double incomplete_fraction,
                          std::uint64_t seed, bool mask_relations) {
    if (slots == 0) throw std::invalid_argument("make_stream: slots must be >= 1");
    if (!(incomplete_fraction >= 0.0 && incomplete_fraction <= 1.0))
        throw std::invalid_argument("make_stream: incomplete_fraction outside [0,1]");

    std::mt19937_64 rng(seed);
    std::vector<Triplet> order = g.triplets();
    std::shuffle(order.begin(), order.end(), rng);

    MessageStream stream;
    stream.seed = seed;
    stream.slots.resize(slots);

    std::size_t n = order.size();
    std::size_t base = n / slots, extra = n % slots;
    std::size_t pos = 0;
    for (std::size_t s = 0; s < slots; ++s) {
        std::size_t batch_n = base + (s < extra ? 1 : 0);
        auto& batch = stream.slots[s];
        batch.reserve(batch_n);
        for (std::size_t i = 0; i < batch_n; ++i)
            batch.push_back(SlotItem{order[pos++]});

        auto n_masked = static_cast<std::size_t>(std::llround(incomplete_fraction * double(batch_n)));
        std::vector<std::size_t> idx(batch_n);
        for (std::size_t i = 0; i < batch_n; ++i) idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i = 0; i < n_masked; ++i) {
            auto& item = batch[idx[i]];
            int n_choices = mask_relations ? 3 : 2;
            switch (std::uniform_int_distribution<int>(0, n_choices - 1)(rng)) {
                case 0: item.mask_head = true; break;
                case 1: item.mask_tail = true; break;
                default: item.mask_relation = true; break;
            }
        }
    }
    return stream;
}

}  // namespace rsc
