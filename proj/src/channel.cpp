#include "rsc/channel.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "rsc/rng.hpp"

namespace rsc {

void QuantizationSpec::validate() const {
    if (bits_per_dim < 2 || bits_per_dim > 64)
        throw std::invalid_argument("QuantizationSpec: bits_per_dim outside [2,64]");
    if (!(clip_range > 0)) throw std::invalid_argument("QuantizationSpec: clip_range must be > 0");
}

void BitString::append(std::uint64_t value, unsigned bits) {
    for (unsigned i = 0; i < bits; ++i) {
        bool bit = (bits - 1 - i < 64) && ((value >> (bits - 1 - i)) & 1);
        std::size_t pos = n_bits_++;
        if (pos / 8 >= bytes_.size()) bytes_.push_back(0);
        set(pos, bit);
    }
}

namespace {

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t n = 0; n < 256; ++n) {
        std::uint32_t c = n;
        for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
        table[n] = c;
    }
    return table;
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    static const auto table = make_crc_table();
    std::uint32_t c = 0xffffffffu;
    for (std::uint8_t b : bytes) c = table[(c ^ b) & 0xff] ^ (c >> 8);
    return c ^ 0xffffffffu;
}

std::uint32_t crc32(const BitString& bits) { return crc32(std::span(bits.bytes())); }

BitString quantize(std::span<const double> vec, const QuantizationSpec& spec) {
    spec.validate();
    const double R = spec.clip_range;
    const unsigned b = spec.bits_per_dim;
    const double levels = std::pow(2.0, double(b)) - 1.0;
    BitString bits;
    for (double x : vec) {
        if (!std::isfinite(x)) throw std::domain_error("quantize: non-finite coordinate");
        double clamped = std::min(R, std::max(-R, x));
        auto code = static_cast<std::uint64_t>(std::llround((clamped + R) / (2.0 * R) * levels));
        bits.append(code, b);
    }
    return bits;
}

std::vector<double> dequantize(const BitString& bits, const QuantizationSpec& spec,
                               std::size_t dim) {
    spec.validate();
    const unsigned b = spec.bits_per_dim;
    if (bits.size() != dim * b)
        throw std::invalid_argument("dequantize: bit length does not match dim * bits_per_dim");
    const double R = spec.clip_range;
    const double levels = std::pow(2.0, double(b)) - 1.0;
    std::vector<double> out(dim);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        std::uint64_t code = 0;
        for (unsigned j = 0; j < b; ++j) code = (code << 1) | std::uint64_t(bits.get(pos++));
        out[i] = double(code) / levels * 2.0 * R - R;
    }
    return out;
}

double snr_to_bit_error_rate(double snr_db) {
    double snr_linear = std::pow(10.0, snr_db / 10.0);
    // Q(sqrt(2*s)) = 0.5 * erfc(sqrt(s))
    return 0.5 * std::erfc(std::sqrt(snr_linear));
}

double ChannelConfig::bit_error_rate() const {
    if (ber_override >= 0) {
        if (ber_override > 1) throw std::invalid_argument("ChannelConfig: ber_override > 1");
        return ber_override;
    }
    return snr_to_bit_error_rate(snr_db);
}

Packet make_packet(const EmbeddingModel& model, EntityId id, const QuantizationSpec& spec) {
    Packet p;
    p.entity_id = id;
    p.payload = quantize(model.entity(id), spec);
    p.crc = crc32(p.payload);
    return p;
}

TransmitResult transmit(const Packet& packet, const ChannelConfig& ch,
                        std::uint64_t packet_index) {
    double p = ch.bit_error_rate();
    TransmitResult result;
    result.received = packet;
    CounterRng rng(ch.seed, packet_index);
    for (std::size_t i = 0; i < packet.payload.size(); ++i)
        if (rng.bernoulli(p)) result.received.payload.flip(i);
    result.corrupted = crc32(result.received.payload) != result.received.crc;
    return result;
}

PerReport transmit_and_recover(const EmbeddingModel& model, const KnowledgeGraph& graph,
                               std::span<const Triplet> triplets, const ChannelConfig& ch,
                               const QuantizationSpec& spec, Recovery recovery) {
    PerReport report;
    std::uint64_t packet_index = 0;
    for (const auto& t : triplets) {
        auto head_rx = transmit(make_packet(model, t.head, spec), ch, packet_index++);
        auto tail_rx = transmit(make_packet(model, t.tail, spec), ch, packet_index++);
        report.packets += 2;

        bool head_bad = head_rx.corrupted;
        bool tail_bad = tail_rx.corrupted;
        if (recovery == Recovery::None) {
            report.errors += std::size_t(head_bad) + std::size_t(tail_bad);
            continue;
        }
        if (!head_bad && !tail_bad) continue;

        PartialTriplet query;
        query.relation = t.relation;
        if (!head_bad) query.head = t.head;
        if (!tail_bad) query.tail = t.tail;
        auto completed = complete(model, graph, query).completed;
        if (head_bad && completed.head != t.head) ++report.errors;
        if (tail_bad && completed.tail != t.tail) ++report.errors;
    }
    report.per = report.packets ? double(report.errors) / double(report.packets) : 0.0;
    return report;
}

}  // namespace rsc
