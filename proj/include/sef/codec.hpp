#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include "sef/common.hpp"
#include "sef/hashchain.hpp"
#include "sef/rng.hpp"
#include "sef/soliton.hpp"

namespace sef {

// Length-k bitvector naming the super-blocks XORed into a droplet. Bit m lives
// in byte m / 8 under mask 0x80 >> (m % 8).
class NeighborVector {
public:
    NeighborVector() = default;
    explicit NeighborVector(std::uint32_t k) : k_(k), bits_((k + 7) / 8, 0) {}
    static NeighborVector from_indices(std::uint32_t k, std::span<const std::uint32_t> indices);
    static NeighborVector from_bytes(std::uint32_t k, ByteView bytes);

    std::uint32_t k() const { return k_; }
    const Bytes& bytes() const { return bits_; }
    bool test(std::uint32_t m) const { return (bits_[m / 8] & (0x80u >> (m % 8))) != 0; }
    void set(std::uint32_t m) { bits_[m / 8] |= static_cast<std::uint8_t>(0x80u >> (m % 8)); }
    void flip(std::uint32_t m) { bits_[m / 8] ^= static_cast<std::uint8_t>(0x80u >> (m % 8)); }
    std::uint32_t degree() const;
    std::vector<std::uint32_t> indices() const;

    friend bool operator==(const NeighborVector&, const NeighborVector&) = default;

private:
    std::uint32_t k_ = 0;
    Bytes bits_;
};

struct Droplet {
    std::uint32_t epoch = 0;
    NeighborVector neighbors;
    Bytes data;

    std::uint32_t degree() const { return neighbors.degree(); }

    // epoch u32, k u32, bitvector, data length u64, data. Big-endian.
    void write(Bytes& out) const;
    static Droplet read(Reader& in);
    std::size_t wire_size() const { return 4 + 4 + neighbors.bytes().size() + 8 + data.size(); }

    friend bool operator==(const Droplet&, const Droplet&) = default;
};

// Headers of the blocks concatenated into one super-block, in chain order.
using HeaderGroup = std::vector<Header>;

// Serialized size of the super-block described by group.
std::uint64_t group_size(const HeaderGroup& group);

// The k super-blocks of one epoch plus their expected headers.
struct EpochView {
    std::uint32_t epoch = 0;
    std::vector<Bytes> super_blocks;
    std::vector<HeaderGroup> headers;

    std::uint32_t k() const { return static_cast<std::uint32_t>(super_blocks.size()); }
};

// XOR with the shorter operand zero-extended.
Bytes xor_padded(ByteView a, ByteView b);
// acc ^= b, growing acc when b is longer.
void xor_into(Bytes& acc, ByteView b);

// d distinct indices from [0, k), uniformly, sorted ascending (Floyd's
// algorithm).
std::vector<std::uint32_t> choose_neighbors(std::uint32_t k, std::uint32_t d, Rng& rng);

// XOR of the super-blocks selected by neighbors.
Bytes combine(std::span<const Bytes> super_blocks, const NeighborVector& neighbors);

Droplet make_droplet(const EpochView& epoch, NeighborVector neighbors);

// Samples a degree from pmf, then that many distinct neighbors.
NeighborVector sample_neighbors(std::uint32_t k, const DegreePmf& pmf, Rng& rng);
Droplet encode_droplet(const EpochView& epoch, const DegreePmf& pmf, Rng& rng);

enum class Verdict { accept, reject };

// Splits data into (header, payload) pairs using the payload sizes in the
// expected headers. Accepts iff every header matches byte-for-byte, every
// payload hashes to its header's Merkle root, and any bytes past the last
// block are zero padding.
Verdict verify_singleton(ByteView data, const HeaderGroup& expected);

enum class DecodeStatus { success, need_more };

struct DecodeOptions {
    // false runs the classical peeling decoder, which accepts every singleton.
    bool verify = true;
};

struct DecodeEvent {
    std::size_t droplet;  // arrival index
    std::uint32_t slot;
    bool accepted;
};

// Error-resilient peeling decoder for one epoch. Singletons are processed
// lowest slot first, ties by arrival order. Droplets may carry their data or
// defer it to a fetch callback that runs only if the droplet is chosen as a
// singleton.
class DecoderState {
public:
    explicit DecoderState(std::vector<HeaderGroup> expected, DecodeOptions options = {},
                          std::uint32_t epoch = 0);
    // Classical decoder over raw symbols of the given lengths; no verification.
    static DecoderState without_headers(std::vector<std::uint64_t> slot_lengths);

    std::size_t add(const Droplet& droplet);
    std::size_t add(Droplet&& droplet);
    std::size_t add_pending(std::uint32_t epoch, const NeighborVector& neighbors,
                            std::function<Bytes()> fetch);

    // Peels until success or until no singleton is left.
    DecodeStatus run();

    std::uint32_t k() const { return k_; }
    bool complete() const { return decoded_count_ == k_; }
    std::uint32_t decoded_count() const { return decoded_count_; }
    const std::optional<Bytes>& block(std::uint32_t m) const { return decoded_[m]; }
    const std::vector<std::optional<Bytes>>& blocks() const { return decoded_; }

    std::size_t received() const { return entries_.size(); }
    std::size_t accepted() const { return accepted_; }
    std::size_t rejected() const { return rejected_; }
    // Droplets dropped without a verdict: redundant (residual degree 0) or
    // malformed (wrong epoch or k).
    std::size_t discarded() const { return discarded_; }
    std::size_t fetched() const { return fetched_; }
    std::uint64_t fetched_bytes() const { return fetched_bytes_; }
    std::uint64_t xor_ops() const { return xor_ops_; }
    const std::vector<DecodeEvent>& log() const { return log_; }

private:
    DecoderState(std::vector<std::uint64_t> lengths, std::vector<HeaderGroup> expected, DecodeOptions options,
                 std::uint32_t epoch);

    struct Entry {
        std::vector<std::uint32_t> neighbors;
        Bytes data;
        std::function<Bytes()> fetch;
        bool has_data = false;
        bool alive = true;
        std::uint32_t degree = 0;
        std::uint64_t residual_sum = 0;
    };

    std::size_t insert(std::uint32_t epoch, const NeighborVector& neighbors, Bytes data,
                       std::function<Bytes()> fetch, bool has_data);
    void materialize(Entry& e, std::uint32_t slot);
    void accept(std::size_t id, std::uint32_t slot);

    std::uint32_t k_ = 0;
    std::uint32_t epoch_;
    DecodeOptions options_;
    std::vector<std::uint64_t> lengths_;
    std::vector<HeaderGroup> expected_;
    std::vector<std::optional<Bytes>> decoded_;
    std::uint32_t decoded_count_ = 0;
    std::vector<Entry> entries_;
    std::vector<std::vector<std::uint32_t>> adjacency_;
    using Candidate = std::pair<std::uint32_t, std::uint32_t>; // (slot, droplet)
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> singletons_;
    std::size_t accepted_ = 0, rejected_ = 0, discarded_ = 0, fetched_ = 0;
    std::uint64_t fetched_bytes_ = 0;
    std::uint64_t xor_ops_ = 0;
    std::vector<DecodeEvent> log_;
};

struct DecodeOutcome {
    DecodeStatus status;
    DecoderState state;

    bool success() const { return status == DecodeStatus::success; }
};

DecodeOutcome decode(std::span<const Droplet> droplets, std::vector<HeaderGroup> expected,
                     DecodeOptions options = {});

// Strips decoded blocks from the new droplets, inserts the survivors and
// resumes peeling.
DecodeStatus add_droplets(DecoderState& state, std::span<const Droplet> more);

} // namespace sef
