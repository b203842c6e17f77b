#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sef/codec.hpp"
#include "sef/hashchain.hpp"
#include "sef/soliton.hpp"

namespace sef {

struct EpochConfig {
    std::uint32_t k = 1;  // super-blocks per epoch
    std::uint32_t s = 1;  // droplets per epoch per node
    std::uint64_t tau = 550;
    // Super-block target size Ls in bytes; nullopt stores one block per
    // super-block.
    std::optional<std::uint64_t> superblock_size;

    double target_savings() const { return static_cast<double>(k) / s; }
    void validate() const;
};

// A run of consecutive blocks packed into one super-block.
struct SuperBlockSpan {
    std::uint64_t first_block = 0;
    std::uint32_t count = 0;
    std::uint64_t size = 0;  // serialized bytes
};

// Greedy packing over block sizes: keep appending while the super-block stays
// within Ls. Sizes come from the headers, so a bucket holding only the
// header-chain derives the same boundaries as the encoder. Throws ConfigError
// when a single block exceeds Ls.
std::vector<SuperBlockSpan> plan_superblocks(std::span<const Header> headers,
                                             std::optional<std::uint64_t> superblock_size);

struct SuperBlock {
    Bytes bytes;
    HeaderGroup headers;
    std::uint64_t first_block = 0;
};

std::vector<SuperBlock> concatenate_blocks(std::span<const Block> blocks,
                                           std::optional<std::uint64_t> superblock_size);

// A chain carved into super-blocks and epochs. Epoch l spans super-blocks
// [l*k, (l+1)*k) and is sealed once every one of them is closed and at least
// tau blocks follow its last block.
class EpochLayout {
public:
    EpochLayout(std::shared_ptr<const Chain> chain, EpochConfig cfg);
    EpochLayout(const Chain& chain, EpochConfig cfg);

    const EpochConfig& config() const { return cfg_; }
    const Chain& chain() const { return *chain_; }
    std::shared_ptr<const Chain> chain_ptr() const { return chain_; }
    const std::vector<SuperBlockSpan>& spans() const { return spans_; }

    std::size_t sealed_epochs() const { return sealed_; }
    // Sealed epochs if the epoch length were k_override (for long tiers).
    std::size_t sealed_epochs(std::uint32_t k_override) const;

    // First block after the last sealed epoch.
    std::uint64_t tail_start() const;

    EpochView view(std::uint32_t epoch) const { return view(epoch, cfg_.k); }
    EpochView view(std::uint32_t epoch, std::uint32_t k) const;
    std::vector<HeaderGroup> header_groups(std::uint32_t epoch, std::uint32_t k) const;
    std::uint64_t epoch_bytes(std::uint32_t epoch, std::uint32_t k) const;
    std::uint64_t epoch_bytes(std::uint32_t epoch) const { return epoch_bytes(epoch, cfg_.k); }

private:
    std::size_t count_sealed(std::uint32_t k) const;

    std::shared_ptr<const Chain> chain_;
    EpochConfig cfg_;
    std::vector<SuperBlockSpan> spans_;
    std::size_t sealed_ = 0;
};

// Per-slot neighbor choices for a node. Slot j draws from its own stream
// derive_seed(seed, k, j), so a node reuses the same degree and neighbors in
// every epoch of the same length.
std::vector<NeighborVector> plan_droplets(std::uint64_t seed, std::uint32_t k, std::uint32_t s,
                                          const DegreePmf& pmf);

struct StoredEpoch {
    std::uint32_t index = 0;  // epoch index at this tier's length
    std::uint32_t k = 0;
    std::uint64_t first_superblock = 0;
    std::uint64_t covered_bytes = 0;  // chain bytes encoded by this entry
    std::vector<Droplet> droplets;
};

struct NodeStore {
    std::uint64_t node_id = 0;
    std::uint64_t seed = 0;
    EpochConfig cfg;
    SolitonParams soliton;  // k is taken from the epoch length
    std::uint32_t next_epoch = 0;
    std::vector<StoredEpoch> epochs;
    std::shared_ptr<const std::vector<Header>> header_chain;
    std::vector<Block> tail;

    friend bool operator==(const NodeStore& a, const NodeStore& b);
};

NodeStore make_node_store(std::uint64_t node_id, std::uint64_t seed, const EpochConfig& cfg,
                          const SolitonParams& soliton);

// Seals the node's next epoch. Throws NotFinalizedError if that epoch is not
// yet tau-deep.
void seal_epoch(NodeStore& store, const EpochLayout& layout, const DegreePmf& pmf);
void seal_epoch(NodeStore& store, const Chain& chain, const EpochConfig& cfg, const DegreePmf& pmf);
// Seals every finalized epoch; returns how many were sealed.
std::size_t seal_all(NodeStore& store, const EpochLayout& layout, const DegreePmf& pmf);

struct TierParams {
    std::uint32_t k = 0;
    std::uint32_t s = 0;
};

// Decoded super-blocks of one small epoch; throws InsufficientDroplets when the
// epoch cannot be recovered.
using SmallEpochDecoder = std::function<std::vector<Bytes>(std::uint32_t small_epoch)>;

// Replaces the small-epoch droplets covering long epoch `long_epoch` with s2
// droplets over the concatenated k2 super-blocks.
void reencode_tier(NodeStore& store, const EpochLayout& layout, std::uint32_t long_epoch,
                   TierParams small, TierParams big, const DegreePmf& big_pmf,
                   const SmallEpochDecoder& decode_fn);

struct StorageSavings {
    // Sealed chain bytes over droplet data bytes.
    double gamma = 0;
    // Chain bytes (sealed plus tail) over every stored byte: droplet data,
    // bitvectors, header-chain and tail.
    double gamma_inclusive = 0;
    std::uint64_t sealed_chain_bytes = 0;
    std::uint64_t droplet_bytes = 0;
    std::uint64_t stored_bytes = 0;
};

StorageSavings storage_savings(const NodeStore& store);

// Snapshot: one JSON manifest line, then droplet records in wire format, then
// the header-chain (L_h bytes each) and the tail blocks.
Bytes encode_node_store(const NodeStore& store, const std::string& provenance_json = "null");
NodeStore decode_node_store(ByteView bytes);
void save_node_store(const NodeStore& store, const std::string& path,
                     const std::string& provenance_json = "null");
NodeStore load_node_store(const std::string& path);

} // namespace sef
