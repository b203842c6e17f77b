#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sef/common.hpp"

namespace sef {

struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    static Digest zero() { return {}; }
    bool is_zero() const;
    std::string hex() const;
    static Digest from_hex(const std::string& hex);

    friend bool operator==(const Digest&, const Digest&) = default;
};

// SHA-256.
Digest hash(ByteView data);

// Bitcoin-style Merkle root: leaves are hash(tx), an odd level duplicates its
// last node, parents are hash(left || right). Throws EmptyPayload on an empty
// list.
Digest merkle_root(std::span<const Bytes> txs);

inline constexpr std::size_t kHeaderSize = 88; // L_h
inline constexpr std::size_t kMetadataSize = 16;

struct Header {
    Digest merkle_root;
    Digest prev_header_hash;
    std::uint64_t payload_size = 0;
    std::array<std::uint8_t, kMetadataSize> metadata{};

    // merkle_root || prev_header_hash || payload_size (BE) || metadata
    std::array<std::uint8_t, kHeaderSize> serialize() const;
    static Header parse(ByteView bytes);
    Digest digest() const;

    friend bool operator==(const Header&, const Header&) = default;
};

struct Block {
    Header header;
    std::vector<Bytes> txs;

    // tx count u32, then (length u32, bytes) per tx.
    Bytes serialize_payload() const;
    // Header bytes followed by the payload serialization.
    Bytes serialize() const;
    std::uint64_t serialized_size() const { return kHeaderSize + header.payload_size; }

    // Parses a payload serialization; the span must be consumed exactly.
    static std::vector<Bytes> parse_payload(ByteView payload);

    friend bool operator==(const Block&, const Block&) = default;
};

struct Chain {
    std::vector<Block> blocks;

    std::size_t height() const { return blocks.size(); }
    std::vector<Header> headers() const;
    std::uint64_t serialized_size() const;

    friend bool operator==(const Chain&, const Chain&) = default;
};

// Builds a block over txs whose header links to prev.
Block make_block(std::vector<Bytes> txs, const Digest& prev,
                 const std::array<std::uint8_t, kMetadataSize>& metadata = {});

bool validate_header_chain(std::span<const Header> headers);

// Longest candidate that validates; ties go to the earliest. Throws NoValidChain.
const std::vector<Header>& longest_valid_header_chain(
    std::span<const std::vector<Header>> candidates);

// Per-block linkage and Merkle check; throws IntegrityError naming the first
// offending block.
void check_chain_integrity(const Chain& chain);

struct FixedSize {
    std::uint64_t payload_bytes;
};
struct UniformSize {
    std::uint64_t lo;
    std::uint64_t hi;
};
// Histogram bins [lo, hi] with relative weight; sizes are uniform inside a bin.
struct EmpiricalSize {
    struct Bin {
        std::uint64_t lo;
        std::uint64_t hi;
        double weight;
    };
    std::vector<Bin> bins;

    // Text format: one "lo hi weight" triple per line (whitespace or commas),
    // '#' starts a comment.
    static EmpiricalSize load(const std::string& path);
    static EmpiricalSize parse(const std::string& text);
    double mean() const;
};
using SizeModel = std::variant<FixedSize, UniformSize, EmpiricalSize>;

struct ChainGenConfig {
    std::uint64_t n_blocks = 0;
    SizeModel size_model = FixedSize{1024};
    // Transactions per block are uniform in [txs_min, txs_max], reduced when a
    // block is too small to hold that many non-empty transactions.
    std::uint32_t txs_min = 1;
    std::uint32_t txs_max = 8;
    // Generated payloads never exceed this (0 = no limit).
    std::uint64_t max_block_size = 0;
    std::uint64_t rng_seed = 0;
};

// Smallest payload serialization that holds one non-empty transaction.
inline constexpr std::uint64_t kMinPayloadSize = 4 + 4 + 1;

Chain generate_chain(const ChainGenConfig& cfg);

// Block-dump file: "SEFCHAIN", version u16, count u64, then per block the
// header followed by the payload serialization. All integers big-endian.
inline constexpr std::uint16_t kChainFileVersion = 1;
Bytes encode_chain(const Chain& chain);
Chain decode_chain(ByteView bytes);
void store_chain(const Chain& chain, const std::string& path);
Chain load_chain(const std::string& path);

} // namespace sef
