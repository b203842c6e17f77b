#include "sef/hashchain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <openssl/sha.h>

#include "sef/rng.hpp"

namespace sef {

Bytes read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, ByteView data)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot create " + path);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out)
        throw IoError("write failed for " + path);
}

bool Digest::is_zero() const
{
    return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

std::string Digest::hex() const
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint8_t b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xF]);
    }
    return out;
}

Digest Digest::from_hex(const std::string& hex)
{
    if (hex.size() != 64)
        throw ParseError("digest hex must be 64 characters");
    auto nibble = [](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9')
            return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f')
            return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F')
            return static_cast<std::uint8_t>(c - 'A' + 10);
        throw ParseError("bad hex digit");
    };
    Digest d;
    for (std::size_t i = 0; i < 32; ++i)
        d.bytes[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return d;
}

Digest hash(ByteView data)
{
    Digest d;
    SHA256(data.data(), data.size(), d.bytes.data());
    return d;
}

Digest merkle_root(std::span<const Bytes> txs)
{
    if (txs.empty())
        throw EmptyPayload();

    std::vector<Digest> level;
    level.reserve(txs.size());
    for (const Bytes& tx : txs)
        level.push_back(hash(tx));

    std::array<std::uint8_t, 64> pair{};
    while (level.size() > 1) {
        if (level.size() % 2 == 1)
            level.push_back(level.back());
        std::vector<Digest> next;
        next.reserve(level.size() / 2);
        for (std::size_t i = 0; i < level.size(); i += 2) {
            std::memcpy(pair.data(), level[i].bytes.data(), 32);
            std::memcpy(pair.data() + 32, level[i + 1].bytes.data(), 32);
            next.push_back(hash(pair));
        }
        level = std::move(next);
    }
    return level.front();
}

std::array<std::uint8_t, kHeaderSize> Header::serialize() const
{
    std::array<std::uint8_t, kHeaderSize> out{};
    std::memcpy(out.data(), merkle_root.bytes.data(), 32);
    std::memcpy(out.data() + 32, prev_header_hash.bytes.data(), 32);
    for (int i = 0; i < 8; ++i)
        out[64 + i] = static_cast<std::uint8_t>(payload_size >> (56 - 8 * i));
    std::memcpy(out.data() + 72, metadata.data(), kMetadataSize);
    return out;
}

Header Header::parse(ByteView bytes)
{
    if (bytes.size() != kHeaderSize)
        throw ParseError("header must be " + std::to_string(kHeaderSize) + " bytes");
    Header h;
    std::memcpy(h.merkle_root.bytes.data(), bytes.data(), 32);
    std::memcpy(h.prev_header_hash.bytes.data(), bytes.data() + 32, 32);
    h.payload_size = get_be(bytes.subspan(64, 8), 8);
    std::memcpy(h.metadata.data(), bytes.data() + 72, kMetadataSize);
    return h;
}

Digest Header::digest() const
{
    const auto bytes = serialize();
    return hash(bytes);
}

Bytes Block::serialize_payload() const
{
    Bytes out;
    std::size_t total = 4;
    for (const Bytes& tx : txs)
        total += 4 + tx.size();
    out.reserve(total);
    put_u32(out, static_cast<std::uint32_t>(txs.size()));
    for (const Bytes& tx : txs) {
        put_u32(out, static_cast<std::uint32_t>(tx.size()));
        out.insert(out.end(), tx.begin(), tx.end());
    }
    return out;
}

Bytes Block::serialize() const
{
    Bytes out;
    out.reserve(serialized_size());
    const auto h = header.serialize();
    out.insert(out.end(), h.begin(), h.end());
    const Bytes payload = serialize_payload();
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

std::vector<Bytes> Block::parse_payload(ByteView payload)
{
    Reader r(payload);
    const std::uint32_t count = r.u32();
    // Each transaction needs at least its length prefix.
    if (count > r.remaining() / 4)
        throw ParseError("transaction count exceeds payload");
    std::vector<Bytes> txs;
    txs.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t len = r.u32();
        ByteView tx = r.take(len);
        txs.emplace_back(tx.begin(), tx.end());
    }
    if (!r.done())
        throw ParseError("trailing bytes after transactions");
    return txs;
}

std::vector<Header> Chain::headers() const
{
    std::vector<Header> out;
    out.reserve(blocks.size());
    for (const Block& b : blocks)
        out.push_back(b.header);
    return out;
}

std::uint64_t Chain::serialized_size() const
{
    std::uint64_t total = 0;
    for (const Block& b : blocks)
        total += b.serialized_size();
    return total;
}

Block make_block(std::vector<Bytes> txs, const Digest& prev,
                 const std::array<std::uint8_t, kMetadataSize>& metadata)
{
    Block b;
    b.txs = std::move(txs);
    b.header.merkle_root = merkle_root(b.txs);
    b.header.prev_header_hash = prev;
    b.header.metadata = metadata;
    std::uint64_t size = 4;
    for (const Bytes& tx : b.txs)
        size += 4 + tx.size();
    b.header.payload_size = size;
    return b;
}

bool validate_header_chain(std::span<const Header> headers)
{
    Digest expected = Digest::zero();
    for (const Header& h : headers) {
        if (h.prev_header_hash != expected)
            return false;
        expected = h.digest();
    }
    return true;
}

const std::vector<Header>& longest_valid_header_chain(
    std::span<const std::vector<Header>> candidates)
{
    const std::vector<Header>* best = nullptr;
    for (const auto& c : candidates) {
        if (best && c.size() <= best->size())
            continue;
        if (validate_header_chain(c))
            best = &c;
    }
    if (!best)
        throw NoValidChain();
    return *best;
}

void check_chain_integrity(const Chain& chain)
{
    Digest expected = Digest::zero();
    for (std::size_t i = 0; i < chain.blocks.size(); ++i) {
        const Block& b = chain.blocks[i];
        if (b.header.prev_header_hash != expected)
            throw IntegrityError("block " + std::to_string(i) + ": previous-header link broken");
        if (b.txs.empty() || merkle_root(b.txs) != b.header.merkle_root)
            throw IntegrityError("block " + std::to_string(i) + ": Merkle root mismatch");
        std::uint64_t size = 4;
        for (const Bytes& tx : b.txs)
            size += 4 + tx.size();
        if (size != b.header.payload_size)
            throw IntegrityError("block " + std::to_string(i) + ": payload size mismatch");
        expected = b.header.digest();
    }
}

// ---------------------------------------------------------------------------
// Synthetic chains

EmpiricalSize EmpiricalSize::parse(const std::string& text)
{
    EmpiricalSize model;
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (auto hash_pos = line.find('#'); hash_pos != std::string::npos)
            line.erase(hash_pos);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        Bin bin{};
        if (!(fields >> bin.lo))
            continue;
        if (!(fields >> bin.hi >> bin.weight))
            throw ConfigError("histogram line " + std::to_string(lineno) + ": expected lo hi weight");
        if (bin.hi < bin.lo || !(bin.weight >= 0) || !std::isfinite(bin.weight))
            throw ConfigError("histogram line " + std::to_string(lineno) + ": invalid bin");
        model.bins.push_back(bin);
    }
    return model;
}

EmpiricalSize EmpiricalSize::load(const std::string& path)
{
    const Bytes raw = read_file(path);
    return parse(std::string(raw.begin(), raw.end()));
}

double EmpiricalSize::mean() const
{
    double total = 0, weighted = 0;
    for (const Bin& b : bins) {
        total += b.weight;
        weighted += b.weight * (static_cast<double>(b.lo) + static_cast<double>(b.hi)) / 2.0;
    }
    return total > 0 ? weighted / total : 0.0;
}

namespace {

struct SizeSampler {
    const ChainGenConfig& cfg;
    std::vector<double> cumulative; // empirical model only

    explicit SizeSampler(const ChainGenConfig& c) : cfg(c)
    {
        auto check_bound = [&](std::uint64_t lo, std::uint64_t hi) {
            if (lo < kMinPayloadSize)
                throw ConfigError("payload sizes must be at least " + std::to_string(kMinPayloadSize) +
                                  " bytes");
            if (hi < lo)
                throw ConfigError("size range has hi < lo");
            if (cfg.max_block_size != 0 && hi > cfg.max_block_size)
                throw ConfigError("size model exceeds the maximum block size");
        };
        if (const auto* f = std::get_if<FixedSize>(&cfg.size_model)) {
            check_bound(f->payload_bytes, f->payload_bytes);
        } else if (const auto* u = std::get_if<UniformSize>(&cfg.size_model)) {
            check_bound(u->lo, u->hi);
        } else {
            const auto& e = std::get<EmpiricalSize>(cfg.size_model);
            double total = 0;
            for (const auto& bin : e.bins) {
                check_bound(bin.lo, bin.hi);
                total += bin.weight;
                cumulative.push_back(total);
            }
            if (cumulative.empty() || !(total > 0))
                throw ConfigError("empirical histogram has no mass");
            for (double& c : cumulative)
                c /= total;
        }
    }

    std::uint64_t operator()(Rng& rng) const
    {
        if (const auto* f = std::get_if<FixedSize>(&cfg.size_model))
            return f->payload_bytes;
        if (const auto* u = std::get_if<UniformSize>(&cfg.size_model))
            return uniform_between(rng, u->lo, u->hi);
        const auto& e = std::get<EmpiricalSize>(cfg.size_model);
        const double x = uniform01(rng);
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
        std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                                e.bins.size() - 1);
        // Skip zero-weight bins that share a cumulative value.
        while (e.bins[idx].weight == 0 && idx + 1 < e.bins.size())
            ++idx;
        return uniform_between(rng, e.bins[idx].lo, e.bins[idx].hi);
    }
};

void fill_random(Rng& rng, Bytes& out)
{
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t word = rng();
        for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
            out[i] = static_cast<std::uint8_t>(word);
            word >>= 8;
        }
    }
}

// Transactions whose payload serialization is exactly payload_size bytes.
std::vector<Bytes> make_transactions(Rng& rng, std::uint64_t payload_size, std::uint32_t txs_min,
                                     std::uint32_t txs_max)
{
    const std::uint64_t max_fit = (payload_size - 4) / 5;
    std::uint64_t n = uniform_between(rng, txs_min, txs_max);
    n = std::max<std::uint64_t>(1, std::min(n, max_fit));

    const std::uint64_t body = payload_size - 4 - 4 * n; // tx bytes, >= n
    const std::uint64_t spare = body - n;
    std::vector<std::uint64_t> cuts(n - 1);
    for (auto& c : cuts)
        c = uniform_between(rng, 0, spare);
    std::sort(cuts.begin(), cuts.end());

    std::vector<Bytes> txs(n);
    std::uint64_t prev = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint64_t next = i + 1 < n ? cuts[i] : spare;
        txs[i].resize(1 + (next - prev));
        fill_random(rng, txs[i]);
        prev = next;
    }
    return txs;
}

} // namespace

Chain generate_chain(const ChainGenConfig& cfg)
{
    if (cfg.txs_min == 0 || cfg.txs_min > cfg.txs_max)
        throw ConfigError("transaction count range must satisfy 1 <= min <= max");
    const SizeSampler sample_size(cfg);

    Rng rng(cfg.rng_seed);
    Chain chain;
    chain.blocks.reserve(cfg.n_blocks);
    Digest prev = Digest::zero();
    for (std::uint64_t i = 0; i < cfg.n_blocks; ++i) {
        const std::uint64_t size = sample_size(rng);
        std::array<std::uint8_t, kMetadataSize> meta{};
        for (int b = 0; b < 8; ++b) {
            meta[b] = static_cast<std::uint8_t>(i >> (56 - 8 * b));
            meta[8 + b] = static_cast<std::uint8_t>(cfg.rng_seed >> (56 - 8 * b));
        }
        Block block = make_block(make_transactions(rng, size, cfg.txs_min, cfg.txs_max), prev, meta);
        prev = block.header.digest();
        chain.blocks.push_back(std::move(block));
    }
    return chain;
}

// ---------------------------------------------------------------------------
// Block-dump files

namespace {
constexpr char kChainMagic[8] = {'S', 'E', 'F', 'C', 'H', 'A', 'I', 'N'};
}

Bytes encode_chain(const Chain& chain)
{
    Bytes out(std::begin(kChainMagic), std::end(kChainMagic));
    put_u16(out, kChainFileVersion);
    put_u64(out, chain.blocks.size());
    for (const Block& b : chain.blocks) {
        const Bytes raw = b.serialize();
        out.insert(out.end(), raw.begin(), raw.end());
    }
    return out;
}

Chain decode_chain(ByteView bytes)
{
    Reader r(bytes);
    ByteView magic = r.take(sizeof(kChainMagic));
    if (!std::equal(magic.begin(), magic.end(), std::begin(kChainMagic)))
        throw ParseError("not a chain file (bad magic)");
    if (const auto version = r.u16(); version != kChainFileVersion)
        throw ParseError("unsupported chain file version " + std::to_string(version));
    const std::uint64_t count = r.u64();
    if (count > r.remaining() / (kHeaderSize + 4))
        throw ParseError("block count exceeds file size");

    Chain chain;
    chain.blocks.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Block b;
        b.header = Header::parse(r.take(kHeaderSize));
        const std::uint32_t ntx = r.u32();
        if (ntx > r.remaining() / 4)
            throw ParseError("transaction count exceeds file size");
        b.txs.reserve(ntx);
        for (std::uint32_t t = 0; t < ntx; ++t) {
            const std::uint32_t len = r.u32();
            ByteView tx = r.take(len);
            b.txs.emplace_back(tx.begin(), tx.end());
        }
        chain.blocks.push_back(std::move(b));
    }
    if (!r.done())
        throw ParseError("trailing bytes after last block");
    check_chain_integrity(chain);
    return chain;
}

void store_chain(const Chain& chain, const std::string& path)
{
    write_file(path, encode_chain(chain));
}

Chain load_chain(const std::string& path)
{
    return decode_chain(read_file(path));
}

} // namespace sef
