#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "helpers.hpp"
#include "sef/epoch.hpp"

using namespace sef;

namespace {

EpochConfig cfg_of(std::uint32_t k, std::uint32_t s, std::uint64_t tau,
                   std::optional<std::uint64_t> ls = std::nullopt)
{
    EpochConfig c;
    c.k = k;
    c.s = s;
    c.tau = tau;
    c.superblock_size = ls;
    return c;
}

} // namespace

TEST_CASE("greedy super-block packing", "[epoch]")
{
    // 100-byte payloads make 188-byte blocks; two fit in 400 bytes.
    const Chain chain = test::fixed_chain(10, 100);
    const auto headers = chain.headers();

    const auto one_each = plan_superblocks(headers, std::nullopt);
    CHECK(one_each.size() == 10);

    const auto spans = plan_superblocks(headers, 400);
    REQUIRE(spans.size() == 5);
    for (std::size_t i = 0; i < spans.size(); ++i) {
        CHECK(spans[i].first_block == 2 * i);
        CHECK(spans[i].count == 2);
        CHECK(spans[i].size == 376);
    }
    CHECK(plan_superblocks(headers, 188).size() == 10);
    CHECK_THROWS_AS(plan_superblocks(headers, 187), ConfigError);
}

TEST_CASE("concatenation partitions the chain", "[epoch]")
{
    ChainGenConfig g;
    g.n_blocks = 60;
    g.size_model = UniformSize{20, 700};
    g.rng_seed = 8;
    const Chain chain = generate_chain(g);
    const auto sbs = concatenate_blocks(chain.blocks, 1500);

    Bytes joined, expect;
    std::uint64_t next = 0;
    for (const SuperBlock& sb : sbs) {
        CHECK(sb.first_block == next);
        CHECK(sb.bytes.size() <= 1500);
        CHECK(sb.bytes.size() == group_size(sb.headers));
        CHECK(verify_singleton(sb.bytes, sb.headers) == Verdict::accept);
        next += sb.headers.size();
        joined.insert(joined.end(), sb.bytes.begin(), sb.bytes.end());
    }
    CHECK(next == 60);
    for (const Block& b : chain.blocks) {
        const Bytes raw = b.serialize();
        expect.insert(expect.end(), raw.begin(), raw.end());
    }
    CHECK(joined == expect);

    // Greedy: the next block would not have fit.
    for (std::size_t i = 0; i + 1 < sbs.size(); ++i)
        CHECK(sbs[i].bytes.size() + kHeaderSize + sbs[i + 1].headers.front().payload_size > 1500);
}

TEST_CASE("epochs seal only when tau deep", "[epoch]")
{
    const Chain chain = test::fixed_chain(10, 64);
    SECTION("one block per super-block")
    {
        const EpochLayout layout(chain, cfg_of(2, 1, 3));
        // Epoch l ends at block 2l+2; sealed while 10 - (2l+2) >= 3.
        CHECK(layout.sealed_epochs() == 3);
        CHECK(layout.tail_start() == 6);
        CHECK(layout.sealed_epochs(5) == 1);
        CHECK(EpochLayout(chain, cfg_of(2, 1, 0)).sealed_epochs() == 5);
        CHECK(EpochLayout(chain, cfg_of(2, 1, 100)).sealed_epochs() == 0);
        CHECK(EpochLayout(chain, cfg_of(2, 1, 100)).tail_start() == 0);
    }
    SECTION("the last super-block stays open under concatenation")
    {
        // 64-byte payloads: 152-byte blocks, two per 400-byte super-block.
        const EpochLayout layout(chain, cfg_of(1, 1, 0, 400));
        CHECK(layout.spans().size() == 5);
        CHECK(layout.sealed_epochs() == 4);
    }
}

TEST_CASE("epoch views line up with the chain", "[epoch]")
{
    const Chain chain = test::fixed_chain(12, 64);
    const EpochLayout layout(chain, cfg_of(3, 1, 0, 400));
    const EpochView v = layout.view(1);
    REQUIRE(v.k() == 3);
    CHECK(v.headers[0].front() == chain.blocks[6].header);
    CHECK(v.super_blocks[0].size() == 2 * (kHeaderSize + 64));
    CHECK(layout.header_groups(1, 3) == v.headers);
    CHECK(layout.epoch_bytes(1) == 6 * (kHeaderSize + 64));
    CHECK_THROWS_AS(layout.view(2), ConfigError);
}

TEST_CASE("node plans are per-slot and reused across epochs", "[epoch]")
{
    const DegreePmf pmf = ideal_soliton(8);
    const auto a = plan_droplets(5, 8, 3, pmf);
    const auto b = plan_droplets(5, 8, 4, pmf);
    REQUIRE(a.size() == 3);
    for (int j = 0; j < 3; ++j)
        CHECK(a[j] == b[j]);
    CHECK_FALSE(plan_droplets(6, 8, 3, pmf) == a);

    const Chain chain = test::fixed_chain(40, 64);
    const EpochLayout layout(chain, cfg_of(8, 3, 0));
    NodeStore store = make_node_store(1, 5, layout.config(), {8, 0.1, 0.5});
    CHECK(seal_all(store, layout, pmf) == 5);
    for (const StoredEpoch& e : store.epochs)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(e.droplets[j].neighbors == a[j]);
    CHECK(store.epochs[3].droplets[0] == make_droplet(layout.view(3), a[0]));
}

TEST_CASE("sealing contract", "[epoch]")
{
    const Chain chain = test::fixed_chain(20, 64);
    const EpochConfig cfg = cfg_of(4, 2, 5);
    const DegreePmf pmf = ideal_soliton(4);
    const EpochLayout layout(chain, cfg);
    REQUIRE(layout.sealed_epochs() == 3);

    NodeStore store = make_node_store(3, 77, cfg, {4, 0.1, 0.5});
    seal_epoch(store, layout, pmf);
    CHECK(store.next_epoch == 1);
    CHECK(store.tail.size() == 16);
    CHECK(store.header_chain->size() == 20);
    CHECK(seal_all(store, layout, pmf) == 2);
    CHECK(store.next_epoch == 3);
    CHECK(store.tail.size() == 8);
    CHECK(store.tail.front() == chain.blocks[12]);
    CHECK_THROWS_AS(seal_epoch(store, layout, pmf), NotFinalizedError);
    CHECK(seal_all(store, layout, pmf) == 0);

    NodeStore fresh = make_node_store(3, 77, cfg, {4, 0.1, 0.5});
    CHECK_THROWS_AS(seal_epoch(fresh, layout, ideal_soliton(5)), ConfigError);
    CHECK_THROWS_AS(seal_epoch(fresh, EpochLayout(chain, cfg_of(5, 2, 5)), ideal_soliton(5)), ConfigError);

    SECTION("sealing later matches sealing now")
    {
        Chain longer = chain;
        for (int i = 0; i < 10; ++i)
            longer.blocks.push_back(
                make_block({Bytes(60, static_cast<std::uint8_t>(i))}, longer.blocks.back().header.digest()));
        REQUIRE_NOTHROW(check_chain_integrity(longer));
        const EpochLayout lay2(longer, cfg);
        NodeStore other = make_node_store(3, 77, cfg, {4, 0.1, 0.5});
        seal_all(other, lay2, pmf);
        REQUIRE(other.epochs.size() >= 3);
        for (int l = 0; l < 3; ++l)
            CHECK(other.epochs[l].droplets == store.epochs[l].droplets);
    }
}

TEST_CASE("storage savings with fixed blocks is exactly k over s", "[epoch]")
{
    const Chain chain = test::fixed_chain(200, 300);
    for (auto [k, s] : {std::pair{10u, 1u}, std::pair{20u, 4u}, std::pair{50u, 5u}}) {
        const EpochLayout layout(chain, cfg_of(k, s, 0));
        NodeStore store = make_node_store(0, 3, layout.config(), {k, 0.1, 0.5});
        seal_all(store, layout, ideal_soliton(k));
        const StorageSavings sv = storage_savings(store);
        CHECK(sv.gamma == static_cast<double>(k) / s);
        CHECK(sv.gamma_inclusive < sv.gamma);
        CHECK(sv.sealed_chain_bytes == 200 * (kHeaderSize + 300));
    }
}

TEST_CASE("two-tier re-encoding", "[epoch]")
{
    const Chain chain = test::fixed_chain(16, 64);
    const EpochConfig small_cfg = cfg_of(4, 2, 0);
    const EpochLayout layout(chain, small_cfg);
    NodeStore store = make_node_store(9, 31, small_cfg, {4, 0.1, 0.5});
    REQUIRE(seal_all(store, layout, ideal_soliton(4)) == 4);
    const double gamma_before = storage_savings(store).gamma;

    auto oracle = [&](std::uint32_t l) { return layout.view(l, 4).super_blocks; };
    reencode_tier(store, layout, 0, {4, 2}, {8, 1}, ideal_soliton(8), oracle);

    REQUIRE(store.epochs.size() == 3);
    CHECK(store.epochs[0].k == 8);
    CHECK(store.epochs[0].droplets.size() == 1);
    CHECK(store.epochs[1].index == 2);
    CHECK(store.epochs[2].index == 3);
    const auto plan = plan_droplets(31, 8, 1, ideal_soliton(8));
    CHECK(store.epochs[0].droplets[0] == make_droplet(layout.view(0, 8), plan[0]));
    CHECK(storage_savings(store).gamma > gamma_before);
    CHECK(storage_savings(store).sealed_chain_bytes == 16 * (kHeaderSize + 64));

    SECTION("bad inputs")
    {
        CHECK_THROWS_AS(reencode_tier(store, layout, 1, {4, 2}, {6, 1}, ideal_soliton(6), oracle), ConfigError);
        CHECK_THROWS_AS(reencode_tier(store, layout, 2, {4, 2}, {8, 1}, ideal_soliton(8), oracle),
                        NotFinalizedError);
        auto short_fn = [&](std::uint32_t l) {
            auto v = oracle(l);
            v.pop_back();
            return v;
        };
        CHECK_THROWS_AS(reencode_tier(store, layout, 1, {4, 2}, {8, 1}, ideal_soliton(8), short_fn),
                        InsufficientDroplets);
        auto corrupt_fn = [&](std::uint32_t l) {
            auto v = oracle(l);
            v[1][10] ^= 1;
            return v;
        };
        CHECK_THROWS_AS(reencode_tier(store, layout, 1, {4, 2}, {8, 1}, ideal_soliton(8), corrupt_fn),
                        IntegrityError);
    }
}

TEST_CASE("node store snapshots round trip", "[epoch]")
{
    const Chain chain = test::fixed_chain(30, 90);
    const EpochConfig cfg = cfg_of(4, 2, 3, 400);
    const EpochLayout layout(chain, cfg);
    const DegreePmf pmf = ideal_soliton(4);
    NodeStore store = make_node_store(12, 4, cfg, {4, 0.05, 0.3});
    REQUIRE(seal_all(store, layout, pmf) > 0);

    const Bytes raw = encode_node_store(store, R"({"who":"test"})");
    CHECK(decode_node_store(raw) == store);
    CHECK(encode_node_store(store, R"({"who":"test"})") == raw);

    const std::string path = (std::filesystem::temp_directory_path() / "sef_test_store.bin").string();
    save_node_store(store, path);
    CHECK(load_node_store(path) == store);
    std::remove(path.c_str());

    SECTION("damaged snapshots")
    {
        Bytes cut(raw.begin(), raw.end() - 1);
        CHECK_THROWS_AS(decode_node_store(cut), ParseError);
        Bytes more = raw;
        more.push_back(0);
        CHECK_THROWS_AS(decode_node_store(more), ParseError);
        Bytes tail_flip = raw;
        tail_flip.back() ^= 1;
        CHECK_THROWS_AS(decode_node_store(tail_flip), IntegrityError);
        Bytes no_manifest{'x', 'y'};
        CHECK_THROWS_AS(decode_node_store(no_manifest), ParseError);
        Bytes bad_json = raw;
        bad_json[0] = '[';
        CHECK_THROWS_AS(decode_node_store(bad_json), ParseError);
    }
}
