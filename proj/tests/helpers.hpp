#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sef/codec.hpp"
#include "sef/epoch.hpp"
#include "sef/hashchain.hpp"
#include "sef/rng.hpp"

namespace sef::test {

inline Chain fixed_chain(std::uint64_t n, std::uint64_t payload, std::uint64_t seed = 11)
{
    ChainGenConfig g;
    g.n_blocks = n;
    g.size_model = FixedSize{payload};
    g.txs_min = 1;
    g.txs_max = 4;
    g.rng_seed = seed;
    return generate_chain(g);
}

inline EpochView whole_chain_view(const Chain& chain, std::uint32_t epoch = 0)
{
    EpochView v;
    v.epoch = epoch;
    for (const Block& b : chain.blocks) {
        v.super_blocks.push_back(b.serialize());
        v.headers.push_back({b.header});
    }
    return v;
}

inline std::string hex(ByteView b)
{
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (std::uint8_t x : b) {
        s += digits[x >> 4];
        s += digits[x & 15];
    }
    return s;
}

// Gaussian elimination over GF(2) for k <= 64. Rows are droplets; returns
// the unique solution when the droplets have full rank, nullopt otherwise.
inline std::optional<std::vector<Bytes>> gf2_solve(std::uint32_t k, const std::vector<Droplet>& droplets)
{
    struct Row {
        std::uint64_t mask;
        Bytes data;
    };
    std::vector<Row> rows;
    for (const Droplet& d : droplets) {
        std::uint64_t mask = 0;
        for (std::uint32_t m : d.neighbors.indices())
            mask |= std::uint64_t{1} << m;
        rows.push_back({mask, d.data});
    }
    std::vector<std::size_t> pivot_row(k, SIZE_MAX);
    std::size_t r = 0;
    for (std::uint32_t col = 0; col < k; ++col) {
        std::size_t sel = r;
        while (sel < rows.size() && !(rows[sel].mask >> col & 1))
            ++sel;
        if (sel == rows.size())
            return std::nullopt;
        std::swap(rows[r], rows[sel]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != r && (rows[i].mask >> col & 1)) {
                rows[i].mask ^= rows[r].mask;
                xor_into(rows[i].data, rows[r].data);
            }
        pivot_row[col] = r;
        ++r;
    }
    std::vector<Bytes> out(k);
    for (std::uint32_t col = 0; col < k; ++col)
        out[col] = rows[pivot_row[col]].data;
    return out;
}

// Strips trailing zero bytes added by padding.
inline Bytes trim(Bytes b, std::size_t len)
{
    b.resize(len, 0);
    return b;
}

} // namespace sef::test
