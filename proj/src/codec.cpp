#include "sef/codec.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <unordered_set>

namespace sef {

NeighborVector NeighborVector::from_indices(std::uint32_t k, std::span<const std::uint32_t> indices)
{
    NeighborVector v(k);
    for (std::uint32_t m : indices) {
        if (m >= k)
            throw ConfigError("neighbor index out of range");
        v.set(m);
    }
    return v;
}

NeighborVector NeighborVector::from_bytes(std::uint32_t k, ByteView bytes)
{
    if (bytes.size() != (static_cast<std::size_t>(k) + 7) / 8)
        throw ParseError("neighbor bitvector length does not match k");
    if (k % 8 != 0 && (bytes.back() & (0xFFu >> (k % 8))) != 0)
        throw ParseError("neighbor bitvector has bits set past k");
    NeighborVector v(k);
    std::copy(bytes.begin(), bytes.end(), v.bits_.begin());
    return v;
}

std::uint32_t NeighborVector::degree() const
{
    std::uint32_t n = 0;
    for (std::uint8_t b : bits_)
        n += static_cast<std::uint32_t>(std::popcount(b));
    return n;
}

std::vector<std::uint32_t> NeighborVector::indices() const
{
    std::vector<std::uint32_t> out;
    for (std::size_t byte = 0; byte < bits_.size(); ++byte) {
        std::uint8_t b = bits_[byte];
        while (b) {
            const int lead = std::countl_zero(b);
            out.push_back(static_cast<std::uint32_t>(byte * 8 + static_cast<std::size_t>(lead)));
            b = static_cast<std::uint8_t>(b & ~(0x80u >> lead));
        }
    }
    return out;
}

void Droplet::write(Bytes& out) const
{
    put_u32(out, epoch);
    put_u32(out, neighbors.k());
    out.insert(out.end(), neighbors.bytes().begin(), neighbors.bytes().end());
    put_u64(out, data.size());
    out.insert(out.end(), data.begin(), data.end());
}

Droplet Droplet::read(Reader& in)
{
    Droplet d;
    d.epoch = in.u32();
    const std::uint32_t k = in.u32();
    d.neighbors = NeighborVector::from_bytes(k, in.take((static_cast<std::size_t>(k) + 7) / 8));
    const std::uint64_t len = in.u64();
    if (len > in.remaining())
        throw ParseError("droplet data length exceeds input");
    ByteView data = in.take(static_cast<std::size_t>(len));
    d.data.assign(data.begin(), data.end());
    return d;
}

std::uint64_t group_size(const HeaderGroup& group)
{
    std::uint64_t n = 0;
    for (const Header& h : group)
        n += kHeaderSize + h.payload_size;
    return n;
}

void xor_into(Bytes& acc, ByteView b)
{
    if (acc.size() < b.size())
        acc.resize(b.size(), 0);
    std::uint8_t* dst = acc.data();
    const std::uint8_t* src = b.data();
    const std::size_t n = b.size();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        std::uint64_t x, y;
        std::memcpy(&x, dst + i, 8);
        std::memcpy(&y, src + i, 8);
        x ^= y;
        std::memcpy(dst + i, &x, 8);
    }
    for (; i < n; ++i)
        dst[i] ^= src[i];
}

Bytes xor_padded(ByteView a, ByteView b)
{
    Bytes out(a.begin(), a.end());
    xor_into(out, b);
    return out;
}

std::vector<std::uint32_t> choose_neighbors(std::uint32_t k, std::uint32_t d, Rng& rng)
{
    if (d > k)
        throw ConfigError("cannot choose more neighbors than blocks");
    std::vector<std::uint32_t> chosen;
    chosen.reserve(d);
    if (2 * static_cast<std::uint64_t>(d) > k) {
        // Dense case: bitmap instead of a hash set.
        std::vector<bool> taken(k, false);
        for (std::uint32_t j = k - d; j < k; ++j) {
            const auto t = static_cast<std::uint32_t>(uniform_below(rng, j + 1));
            const std::uint32_t pick = taken[t] ? j : t;
            taken[pick] = true;
        }
        for (std::uint32_t m = 0; m < k; ++m)
            if (taken[m])
                chosen.push_back(m);
        return chosen;
    }
    std::unordered_set<std::uint32_t> taken;
    taken.reserve(d * 2);
    for (std::uint32_t j = k - d; j < k; ++j) {
        const auto t = static_cast<std::uint32_t>(uniform_below(rng, j + 1));
        const std::uint32_t pick = taken.contains(t) ? j : t;
        taken.insert(pick);
        chosen.push_back(pick);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

Bytes combine(std::span<const Bytes> super_blocks, const NeighborVector& neighbors)
{
    Bytes acc;
    for (std::uint32_t m : neighbors.indices())
        xor_into(acc, super_blocks[m]);
    return acc;
}

Droplet make_droplet(const EpochView& epoch, NeighborVector neighbors)
{
    Droplet d;
    d.epoch = epoch.epoch;
    d.data = combine(epoch.super_blocks, neighbors);
    d.neighbors = std::move(neighbors);
    return d;
}

NeighborVector sample_neighbors(std::uint32_t k, const DegreePmf& pmf, Rng& rng)
{
    if (pmf.k() != k)
        throw ConfigError("degree distribution support does not match epoch length");
    const std::uint32_t d = sample_degree(pmf, rng);
    const auto idx = choose_neighbors(k, d, rng);
    return NeighborVector::from_indices(k, idx);
}

Droplet encode_droplet(const EpochView& epoch, const DegreePmf& pmf, Rng& rng)
{
    return make_droplet(epoch, sample_neighbors(epoch.k(), pmf, rng));
}

Verdict verify_singleton(ByteView data, const HeaderGroup& expected)
{
    std::size_t offset = 0;
    for (const Header& h : expected) {
        if (h.payload_size > data.size() || offset + kHeaderSize + h.payload_size > data.size())
            return Verdict::reject;
        const auto want = h.serialize();
        if (!std::equal(want.begin(), want.end(), data.begin() + static_cast<std::ptrdiff_t>(offset)))
            return Verdict::reject;
        offset += kHeaderSize;
        ByteView payload = data.subspan(offset, h.payload_size);
        offset += h.payload_size;
        try {
            const auto txs = Block::parse_payload(payload);
            if (txs.empty() || merkle_root(txs) != h.merkle_root)
                return Verdict::reject;
        } catch (const ParseError&) {
            return Verdict::reject;
        }
    }
    for (std::size_t i = offset; i < data.size(); ++i)
        if (data[i] != 0)
            return Verdict::reject;
    return Verdict::accept;
}

// ---------------------------------------------------------------------------
// Peeling decoder

DecoderState::DecoderState(std::vector<std::uint64_t> lengths, std::vector<HeaderGroup> expected,
                           DecodeOptions options, std::uint32_t epoch)
    : epoch_(epoch), options_(options), lengths_(std::move(lengths)), expected_(std::move(expected))
{
    if (lengths_.empty())
        for (const HeaderGroup& g : expected_)
            lengths_.push_back(group_size(g));
    k_ = static_cast<std::uint32_t>(lengths_.size());
    decoded_.resize(k_);
    adjacency_.resize(k_);
}

DecoderState::DecoderState(std::vector<HeaderGroup> expected, DecodeOptions options, std::uint32_t epoch)
    : DecoderState({}, std::move(expected), options, epoch)
{
}

DecoderState DecoderState::without_headers(std::vector<std::uint64_t> slot_lengths)
{
    return DecoderState(std::move(slot_lengths), {}, DecodeOptions{.verify = false}, 0);
}

std::size_t DecoderState::add(const Droplet& droplet)
{
    return insert(droplet.epoch, droplet.neighbors, droplet.data, {}, true);
}

std::size_t DecoderState::add(Droplet&& droplet)
{
    return insert(droplet.epoch, droplet.neighbors, std::move(droplet.data), {}, true);
}

std::size_t DecoderState::add_pending(std::uint32_t epoch, const NeighborVector& neighbors,
                                      std::function<Bytes()> fetch)
{
    return insert(epoch, neighbors, {}, std::move(fetch), false);
}

std::size_t DecoderState::insert(std::uint32_t epoch, const NeighborVector& neighbors, Bytes data,
                                 std::function<Bytes()> fetch, bool has_data)
{
    const std::size_t id = entries_.size();
    Entry& e = entries_.emplace_back();
    if (epoch != epoch_ || neighbors.k() != k_) {
        e.alive = false;
        ++discarded_;
        return id;
    }
    e.neighbors = neighbors.indices();
    e.data = std::move(data);
    e.fetch = std::move(fetch);
    e.has_data = has_data;
    for (std::uint32_t m : e.neighbors) {
        if (decoded_[m]) {
            // Lazy droplets get their decoded neighbors stripped on fetch.
            if (e.has_data) {
                xor_into(e.data, *decoded_[m]);
                ++xor_ops_;
            }
        } else {
            ++e.degree;
            e.residual_sum += m;
            adjacency_[m].push_back(static_cast<std::uint32_t>(id));
        }
    }
    if (e.degree == 0) {
        e.alive = false;
        e.data = {};
        ++discarded_;
    } else if (e.degree == 1) {
        singletons_.emplace(static_cast<std::uint32_t>(e.residual_sum), static_cast<std::uint32_t>(id));
    }
    return id;
}

void DecoderState::materialize(Entry& e, std::uint32_t slot)
{
    if (e.has_data)
        return;
    e.data = e.fetch();
    e.fetch = {};
    e.has_data = true;
    ++fetched_;
    fetched_bytes_ += e.data.size();
    for (std::uint32_t m : e.neighbors) {
        if (m == slot)
            continue;
        xor_into(e.data, *decoded_[m]);
        ++xor_ops_;
    }
}

void DecoderState::accept(std::size_t id, std::uint32_t slot)
{
    Bytes block = std::move(entries_[id].data);
    entries_[id].data = {};
    block.resize(lengths_[slot], 0);
    decoded_[slot] = std::move(block);
    ++decoded_count_;
    ++accepted_;
    const Bytes& value = *decoded_[slot];

    for (std::uint32_t other : adjacency_[slot]) {
        if (other == id)
            continue;
        Entry& e = entries_[other];
        if (!e.alive)
            continue;
        if (e.has_data) {
            xor_into(e.data, value);
            ++xor_ops_;
        }
        --e.degree;
        e.residual_sum -= slot;
        if (e.degree == 1) {
            singletons_.emplace(static_cast<std::uint32_t>(e.residual_sum), other);
        } else if (e.degree == 0) {
            e.alive = false;
            e.data = {};
            e.fetch = {};
            ++discarded_;
        }
    }
    adjacency_[slot].clear();
    adjacency_[slot].shrink_to_fit();
}

DecodeStatus DecoderState::run()
{
    while (!complete() && !singletons_.empty()) {
        const auto [slot, id] = singletons_.top();
        singletons_.pop();
        Entry& e = entries_[id];
        if (!e.alive || e.degree != 1 || e.residual_sum != slot)
            continue;

        materialize(e, slot);
        e.alive = false;
        const bool ok = !options_.verify || verify_singleton(e.data, expected_[slot]) == Verdict::accept;
        log_.push_back({id, slot, ok});
        if (ok) {
            accept(id, slot);
        } else {
            e.data = {};
            ++rejected_;
        }
    }
    return complete() ? DecodeStatus::success : DecodeStatus::need_more;
}

DecodeOutcome decode(std::span<const Droplet> droplets, std::vector<HeaderGroup> expected,
                     DecodeOptions options)
{
    const std::uint32_t epoch = droplets.empty() ? 0 : droplets.front().epoch;
    DecoderState state(std::move(expected), options, epoch);
    for (const Droplet& d : droplets)
        state.add(d);
    const DecodeStatus status = state.run();
    return {status, std::move(state)};
}

DecodeStatus add_droplets(DecoderState& state, std::span<const Droplet> more)
{
    for (const Droplet& d : more)
        state.add(d);
    return state.run();
}

} // namespace sef
