#include <catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "sef/sim.hpp"

using namespace sef;

namespace {

NetworkConfig net_cfg(std::uint32_t k, std::uint32_t s, double sigma = 0)
{
    NetworkConfig c;
    c.epoch.k = k;
    c.epoch.s = s;
    c.epoch.tau = 0;
    c.sigma = sigma;
    c.c = 0.1;
    c.delta = 0.5;
    c.trials = 20;
    c.seed = 4;
    c.threads = 1;
    return c;
}

std::shared_ptr<const SimContext> ctx_for(std::uint64_t blocks, std::uint64_t payload, const EpochConfig& e)
{
    return make_context(std::make_shared<const Chain>(test::fixed_chain(blocks, payload)), e);
}

} // namespace

TEST_CASE("toy network bootstrap", "[sim]")
{
    const Network net = toy_network();
    REQUIRE(net.size() == 9);
    CHECK(net.count(NodeKind::murky) == 2);
    BootstrapTrace trace;
    const BootstrapResult r = bootstrap(net, &trace);
    REQUIRE(r.success);
    CHECK(r.rejections == 2);
    CHECK(r.nodes_contacted == 9);
    CHECK(trace.chain == *net.ctx->chain);

    REQUIRE(trace.events.size() == 1);
    const auto& ev = trace.events[0];
    // (droplet, slot, accepted) with 0-based indices.
    const std::vector<std::tuple<std::size_t, std::uint32_t, bool>> expect = {
        {3, 2, true}, {5, 5, false}, {7, 5, true}, {4, 0, true},
        {0, 3, true}, {8, 1, true},  {1, 4, false}, {6, 4, true},
    };
    REQUIRE(ev.size() == expect.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
        CHECK(ev[i].droplet == std::get<0>(expect[i]));
        CHECK(ev[i].slot == std::get<1>(expect[i]));
        CHECK(ev[i].accepted == std::get<2>(expect[i]));
    }
}

TEST_CASE("adversary counts follow sigma and the mix", "[sim]")
{
    auto ctx = ctx_for(20, 64, net_cfg(10, 1).epoch);
    NetworkConfig cfg = net_cfg(10, 1, 0.3);
    cfg.pmf = PmfKind::ideal;
    cfg.N = 100;
    cfg.mix = {0.5, 0.25, 0.25, 0};
    const Network net = build_network(ctx, cfg, 1);
    CHECK(net.count(NodeKind::silent) == 15);
    // 7.5 and 7.5: the remainder goes to the earlier kind.
    CHECK(net.count(NodeKind::murky) == 8);
    CHECK(net.count(NodeKind::opaque) == 7);
    CHECK(net.count(NodeKind::honest) == 70);

    cfg.mix = {0, 0, 0, 1};
    const Network bribed = build_network(ctx, cfg, 1);
    CHECK(bribed.count(NodeKind::honest) + bribed.count(NodeKind::silent) == 100);
    CHECK(bribed.count(NodeKind::silent) <= 30);

    cfg.mix = {0.5, 0.6, 0, 0};
    CHECK_THROWS_AS(build_network(ctx, cfg, 1), ConfigError);
    cfg = net_cfg(10, 1, 1.0);
    CHECK_THROWS_AS(build_network(ctx, cfg, 1), ConfigError);
}

TEST_CASE("adversary droplets", "[sim]")
{
    auto ctx = ctx_for(16, 80, net_cfg(8, 2).epoch);
    NetworkConfig cfg = net_cfg(8, 2, 0.5);
    cfg.N = 40;
    cfg.pmf = PmfKind::ideal;

    SECTION("opaque nodes hand out the first super-block")
    {
        cfg.mix = {0, 0, 1, 0};
        const Network net = build_network(ctx, cfg, 3);
        for (std::uint32_t i = 0; i < net.size(); ++i) {
            if (net.nodes[i].kind != NodeKind::opaque)
                continue;
            for (std::uint32_t l = 0; l < 2; ++l)
                for (const Droplet& d : node_droplets(net, i, l)) {
                    CHECK(d.neighbors.indices() == std::vector<std::uint32_t>{0});
                    CHECK(d.data == ctx->views[l].super_blocks[0]);
                }
            CHECK(node_header_chain(net, i).size() == 15);
        }
    }
    SECTION("murky droplets never satisfy c = vB")
    {
        cfg.mix = {0, 1, 0, 0};
        const Network net = build_network(ctx, cfg, 3);
        std::size_t seen = 0;
        for (std::uint32_t i = 0; i < net.size(); ++i) {
            if (net.nodes[i].kind != NodeKind::murky)
                continue;
            for (const Droplet& d : node_droplets(net, i, 1)) {
                ++seen;
                CHECK(d.data != combine(ctx->views[1].super_blocks, d.neighbors));
            }
            CHECK_FALSE(validate_header_chain(node_header_chain(net, i)));
        }
        CHECK(seen == 40);
    }
    SECTION("silent nodes say nothing")
    {
        cfg.mix = {1, 0, 0, 0};
        const Network net = build_network(ctx, cfg, 3);
        for (std::uint32_t i = 0; i < net.size(); ++i)
            if (net.nodes[i].kind == NodeKind::silent) {
                CHECK(node_droplets(net, i, 0).empty());
                CHECK(node_header_chain(net, i).empty());
                CHECK(node_tail(net, i).empty());
            }
    }
}

TEST_CASE("one node suffices when it stores the whole epoch", "[sim]")
{
    SECTION("k = s = 1")
    {
        NetworkConfig cfg = net_cfg(1, 1);
        cfg.pmf = PmfKind::ideal;
        auto ctx = ctx_for(5, 64, cfg.epoch);
        const auto rep = measure_bootstrap_cost(ctx, cfg);
        CHECK(rep.success_rate == 1.0);
        CHECK(rep.k_hat == 1);
        CHECK(rep.cost_max == 1);
    }
    SECTION("random sampling with s = k")
    {
        NetworkConfig cfg = net_cfg(6, 6);
        cfg.scheme = Scheme::random_sampling;
        auto ctx = ctx_for(12, 64, cfg.epoch);
        const auto rep = measure_bootstrap_cost(ctx, cfg);
        CHECK(rep.success_rate == 1.0);
        CHECK(rep.cost_max == 1);
    }
}

TEST_CASE("honest cost lower bound", "[sim]")
{
    for (auto mix : {AdversaryMix{0, 1, 0, 0}, AdversaryMix{1, 0, 0, 0}, AdversaryMix{0.5, 0.5, 0, 0}}) {
        for (double sigma : {0.0, 0.3}) {
            NetworkConfig cfg = net_cfg(50, 2, sigma);
            cfg.mix = mix;
            auto ctx = ctx_for(100, 64, cfg.epoch);
            const auto rep = measure_bootstrap_cost(ctx, cfg);
            CHECK(rep.success_rate == 1.0);
            for (const BootstrapResult& r : rep.trials) {
                CHECK(r.honest_contacted * 2 >= 50);
                CHECK(r.nodes_contacted >= r.honest_contacted);
            }
        }
    }
}

TEST_CASE("bootstrap recovers the exact chain under attack", "[sim]")
{
    ChainGenConfig g;
    g.n_blocks = 200;
    g.size_model = UniformSize{50, 500};
    g.rng_seed = 21;
    auto chain = std::make_shared<const Chain>(generate_chain(g));

    NetworkConfig cfg = net_cfg(20, 1, 0.4);
    cfg.epoch.superblock_size = 1200;
    cfg.epoch.tau = 10;
    cfg.mix = {0.2, 0.5, 0.3, 0};
    auto ctx = make_context(chain, cfg.epoch);
    REQUIRE(ctx->epochs() >= 2);
    REQUIRE(ctx->tail_bytes > 0);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (BootstrapMode mode : {BootstrapMode::bulk, BootstrapMode::as_needed}) {
            cfg.mode = mode;
            const Network net = build_network(ctx, cfg, seed);
            BootstrapTrace trace;
            const BootstrapResult r = run_bootstrap(net, &trace);
            REQUIRE(r.success);
            CHECK(r.header_chain_ok);
            CHECK(trace.chain == *chain);
        }
    }
}

TEST_CASE("as-needed downloads no more than bulk", "[sim]")
{
    NetworkConfig cfg = net_cfg(40, 2, 0.2);
    auto ctx = ctx_for(120, 2000, cfg.epoch);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Network net = build_network(ctx, cfg, seed);
        const BootstrapResult bulk = bootstrap(net);
        const BootstrapResult lazy = bootstrap_as_needed(net);
        REQUIRE(bulk.success);
        REQUIRE(lazy.success);
        CHECK(lazy.nodes_contacted == bulk.nodes_contacted);
        CHECK(lazy.rejections <= bulk.rejections);
        CHECK(lazy.bytes_downloaded <= bulk.bytes_downloaded);
        CHECK(bulk.bytes_downloaded >= bulk.bytes_blockchain);
    }
}

TEST_CASE("bribery silences singleton holders", "[sim]")
{
    NetworkConfig cfg = net_cfg(30, 1);
    cfg.N = 200;
    auto ctx = ctx_for(30, 64, cfg.epoch);
    Network net = build_network(ctx, cfg, 5);
    CHECK(bribery_attack(net, 0) == 0);
    CHECK(net.count(NodeKind::honest) == 200);

    std::size_t holders = 0;
    for (const SimNode& n : net.nodes)
        holders += n.plan[0].degree() == 1;
    REQUIRE(holders > 0);
    CHECK(bribery_attack(net, 3) == std::min<std::size_t>(3, holders));
    CHECK(bribery_attack(net, 1000) == holders - std::min<std::size_t>(3, holders));
    CHECK(net.count(NodeKind::silent) == holders);
    // Nobody left can start the peeling.
    CHECK_FALSE(bootstrap(net).success);
}

TEST_CASE("trial results do not depend on the thread count", "[sim]")
{
    NetworkConfig cfg = net_cfg(30, 1, 0.2);
    cfg.trials = 24;
    auto ctx = ctx_for(60, 64, cfg.epoch);
    cfg.threads = 1;
    const auto a = measure_bootstrap_cost(ctx, cfg);
    cfg.threads = 4;
    const auto b = measure_bootstrap_cost(ctx, cfg);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t t = 0; t < a.trials.size(); ++t) {
        CHECK(a.trials[t].nodes_contacted == b.trials[t].nodes_contacted);
        CHECK(a.trials[t].bytes_downloaded == b.trials[t].bytes_downloaded);
    }
    CHECK(a.k_hat == b.k_hat);
    CHECK(a.gamma_mean == b.gamma_mean);
}

TEST_CASE("measured savings matches the target for fixed blocks", "[sim]")
{
    NetworkConfig cfg = net_cfg(20, 4);
    cfg.N = 30;
    auto ctx = ctx_for(40, 100, cfg.epoch);
    const Network net = build_network(ctx, cfg, 1);
    CHECK(measured_savings(net) == Catch::Approx(5.0));
}

TEST_CASE("nearest-rank quantile", "[sim]")
{
    CHECK(empirical_quantile({4, 1, 3, 2}, 0.5) == 2);
    CHECK(empirical_quantile({4, 1, 3, 2}, 0.99) == 4);
    CHECK(empirical_quantile({4, 1, 3, 2}, 0.0) == 1);
    CHECK(std::isinf(empirical_quantile({1, kNeverSucceeded}, 0.99)));
    CHECK(empirical_quantile({1, kNeverSucceeded}, 0.5) == 1);
    CHECK(std::isinf(empirical_quantile({}, 0.5)));
}

TEST_CASE("network configuration", "[sim]")
{
    NetworkConfig cfg = net_cfg(100, 2, 0.5);
    CHECK(cfg.resolved_n() == 350);
    cfg.N = 17;
    CHECK(cfg.resolved_n() == 17);
    cfg.s_choices = {1, 3};
    CHECK(cfg.node_s(0) == 1);
    CHECK(cfg.node_s(5) == 3);
    CHECK(cfg.target_savings() == Catch::Approx(100.0 / 3));

    CHECK(parse_mode("as-needed") == BootstrapMode::as_needed);
    CHECK(parse_scheme("random-sampling") == Scheme::random_sampling);
    CHECK_THROWS_AS(parse_mode("lazy"), ConfigError);
    CHECK_THROWS_AS(parse_scheme("x"), ConfigError);

    NetworkConfig bad = net_cfg(4, 5);
    bad.scheme = Scheme::random_sampling;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_THROWS_AS(ctx_for(3, 64, net_cfg(4, 1).epoch), ConfigError);
}
