#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rsc/embedding.hpp"
#include "rsc/kg.hpp"
#include "rsc/reasoning.hpp"

namespace rsc {

struct QuantizationSpec {
    unsigned bits_per_dim = 16;
    double clip_range = 1.0;  // values clamped to [-R, R]

    void validate() const;
};

struct ChannelConfig {
    double snr_db = 10.0;  // per-bit SNR of the binary antipodal AWGN channel
    std::uint64_t seed = 0;
    double ber_override = -1;  // >= 0 replaces the SNR-derived flip probability

    double bit_error_rate() const;
};

// MSB-first bit string backed by packed bytes.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t n_bits) : n_bits_(n_bits), bytes_((n_bits + 7) / 8, 0) {}

    std::size_t size() const { return n_bits_; }
    bool get(std::size_t i) const { return (bytes_[i / 8] >> (7 - i % 8)) & 1; }
    void set(std::size_t i, bool v) {
        std::uint8_t mask = std::uint8_t(1) << (7 - i % 8);
        if (v) bytes_[i / 8] |= mask;
        else bytes_[i / 8] &= std::uint8_t(~mask);
    }
    void flip(std::size_t i) { bytes_[i / 8] ^= std::uint8_t(1) << (7 - i % 8); }
    void append(std::uint64_t value, unsigned bits);
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::size_t n_bits_ = 0;
    std::vector<std::uint8_t> bytes_;
};

// IEEE CRC-32 over the payload bytes.
std::uint32_t crc32(std::span<const std::uint8_t> bytes);
std::uint32_t crc32(const BitString& bits);

// Uniform scalar quantizer: clamp to [-R, R], affine map to bits_per_dim-bit
// codes, MSB first. code = round((x + R) / (2R) * (2^b - 1)).
BitString quantize(std::span<const double> vec, const QuantizationSpec& spec);
std::vector<double> dequantize(const BitString& bits, const QuantizationSpec& spec,
                               std::size_t dim);

// Bit error probability of binary antipodal signaling over AWGN:
// p = Q(sqrt(2 * snr_linear)).
double snr_to_bit_error_rate(double snr_db);

struct Packet {
    EntityId entity_id{};       // header, assumed error-free
    BitString payload;
    std::uint32_t crc = 0;
};

Packet make_packet(const EmbeddingModel& model, EntityId id, const QuantizationSpec& spec);

struct TransmitResult {
    Packet received;
    bool corrupted = false;  // recomputed crc mismatch
};

// Flips each payload bit independently with the SNR's error probability.
// The noise for packet_index is a pure function of (seed, packet_index).
TransmitResult transmit(const Packet& packet, const ChannelConfig& ch,
                        std::uint64_t packet_index);

enum class Recovery { None, Reasoning };

struct PerReport {
    std::size_t packets = 0;
    std::size_t errors = 0;
    double per = 0;
};

// Transmits head and tail entity packets of every triplet. Under
// Recovery::None a corrupted packet is an error; under Recovery::Reasoning
// the corrupted slot is blanked and completed from the intact slot(s) and
// the relation, and the packet errs only if the recovered id differs.
PerReport transmit_and_recover(const EmbeddingModel& model, const KnowledgeGraph& graph,
                               std::span<const Triplet> triplets, const ChannelConfig& ch,
                               const QuantizationSpec& spec, Recovery recovery);

}  // namespace rsc
