#include "sef/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

namespace sef {

namespace {

constexpr std::uint64_t kNodeStream = 0x6e6f6465;
constexpr std::uint64_t kAdversaryStream = 0x616476;
constexpr std::uint64_t kOrderStream = 0x6f72646572;
constexpr std::uint64_t kHeaderStream = 0x68647273;
constexpr std::uint64_t kMurkyStream = 0x6d75726b;
constexpr std::uint64_t kTrialStream = 0x747269616c;

template <class T>
void shuffle(std::vector<T>& v, Rng& rng)
{
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

// Splits total into parts proportional to weights (largest remainder, ties to
// the earlier part).
std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& weights)
{
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<std::size_t> out(weights.size(), 0);
    if (total == 0 || sum <= 0)
        return out;
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t given = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(total) * weights[i] / sum;
        out[i] = static_cast<std::size_t>(std::floor(exact));
        given += out[i];
        rem.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t j = 0; given < total; ++j, ++given)
        out[rem[j % rem.size()].second] += 1;
    return out;
}

bool all_zero(ByteView b)
{
    return std::all_of(b.begin(), b.end(), [](std::uint8_t x) { return x == 0; });
}

} // namespace

const char* to_string(NodeKind kind)
{
    switch (kind) {
    case NodeKind::honest: return "honest";
    case NodeKind::silent: return "silent";
    case NodeKind::murky: return "murky";
    case NodeKind::opaque: return "opaque";
    }
    return "?";
}

const char* to_string(BootstrapMode mode)
{
    return mode == BootstrapMode::bulk ? "bulk" : "as-needed";
}

const char* to_string(Scheme scheme)
{
    return scheme == Scheme::sef ? "sef" : "random-sampling";
}

BootstrapMode parse_mode(const std::string& s)
{
    if (s == "bulk")
        return BootstrapMode::bulk;
    if (s == "as-needed" || s == "as_needed")
        return BootstrapMode::as_needed;
    throw ConfigError("unknown bootstrap mode '" + s + "'");
}

Scheme parse_scheme(const std::string& s)
{
    if (s == "sef")
        return Scheme::sef;
    if (s == "random-sampling" || s == "random_sampling")
        return Scheme::random_sampling;
    throw ConfigError("unknown scheme '" + s + "'");
}

void AdversaryMix::validate() const
{
    for (double w : {silent, murky, opaque, bribery})
        if (!(w >= 0) || !std::isfinite(w))
            throw ConfigError("adversary mix weights must be non-negative");
    if (std::abs(silent + murky + opaque + bribery - 1.0) > 1e-9)
        throw ConfigError("adversary mix weights must sum to 1");
}

void NetworkConfig::validate() const
{
    epoch.validate();
    mix.validate();
    if (!(sigma >= 0 && sigma < 1))
        throw ConfigError("adversary fraction sigma must lie in [0, 1)");
    if (trials == 0)
        throw ConfigError("trials must be >= 1");
    if (n_initial == 0 || n_hat == 0)
        throw ConfigError("contact batch sizes must be >= 1");
    for (std::uint32_t s : s_choices)
        if (s == 0)
            throw ConfigError("per-node s must be >= 1");
    if ((scheme == Scheme::random_sampling || pmf == PmfKind::all_at_once) && max_s() > epoch.k)
        throw ConfigError("random sampling needs s <= k");
}

std::uint32_t NetworkConfig::max_s() const
{
    if (s_choices.empty())
        return epoch.s;
    return *std::max_element(s_choices.begin(), s_choices.end());
}

std::uint32_t NetworkConfig::node_s(std::uint32_t node) const
{
    return s_choices.empty() ? epoch.s : s_choices[node % s_choices.size()];
}

double NetworkConfig::target_savings() const
{
    return static_cast<double>(epoch.k) / max_s();
}

std::uint32_t NetworkConfig::resolved_n() const
{
    if (N > 0)
        return N;
    const std::uint32_t min_s =
        s_choices.empty() ? epoch.s : *std::min_element(s_choices.begin(), s_choices.end());
    const double k = epoch.k;
    double honest_needed = 3.0 * k / min_s;
    if (scheme == Scheme::random_sampling)
        honest_needed = k * (std::log(k) + std::log(1000.0)) / min_s + 1;
    return static_cast<std::uint32_t>(std::ceil(honest_needed / (1.0 - sigma))) + 50;
}

std::shared_ptr<const SimContext> make_context(std::shared_ptr<const Chain> chain, const EpochConfig& cfg)
{
    auto ctx = std::make_shared<SimContext>();
    ctx->chain = chain;
    ctx->layout = std::make_shared<const EpochLayout>(chain, cfg);
    const std::size_t n = ctx->layout->sealed_epochs();
    if (n == 0)
        throw ConfigError("chain of height " + std::to_string(chain->height()) +
                          " has no sealed epoch");
    for (std::uint32_t l = 0; l < n; ++l) {
        ctx->views.push_back(ctx->layout->view(l));
        ctx->groups.push_back(ctx->views.back().headers);
        ctx->sealed_bytes += ctx->layout->epoch_bytes(l);
    }
    ctx->headers = chain->headers();
    for (std::uint64_t i = ctx->layout->tail_start(); i < chain->height(); ++i)
        ctx->tail_bytes += chain->blocks[i].serialized_size();
    return ctx;
}

std::size_t Network::count(NodeKind kind) const
{
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [&](const SimNode& n) { return n.kind == kind; }));
}

DegreePmf make_pmf(const NetworkConfig& cfg)
{
    const std::uint32_t k = cfg.epoch.k;
    if (cfg.scheme == Scheme::random_sampling)
        return all_at_once(k, cfg.epoch.s);
    switch (cfg.pmf) {
    case PmfKind::ideal: return ideal_soliton(k);
    case PmfKind::robust: return robust_soliton({k, cfg.c, cfg.delta});
    case PmfKind::all_at_once: return all_at_once(k, cfg.epoch.s);
    }
    throw ConfigError("unknown degree distribution");
}

Network build_network(std::shared_ptr<const SimContext> ctx, const NetworkConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    if (ctx->layout->config().k != cfg.epoch.k)
        throw ConfigError("network epoch length does not match the chain layout");

    Network net;
    net.ctx = std::move(ctx);
    net.cfg = cfg;
    net.seed = seed;
    const std::uint32_t N = cfg.resolved_n();
    const std::uint32_t k = cfg.epoch.k;
    net.nodes.resize(N);

    std::optional<DegreePmf> pmf;
    std::map<std::uint32_t, DegreePmf> sampling_pmfs;
    if (cfg.scheme == Scheme::sef)
        pmf = make_pmf(cfg);

    for (std::uint32_t i = 0; i < N; ++i) {
        SimNode& node = net.nodes[i];
        node.seed = derive_seed(seed, i, kNodeStream);
        node.s = cfg.node_s(i);
        if (cfg.scheme == Scheme::sef) {
            node.plan = plan_droplets(node.seed, k, node.s, *pmf);
            continue;
        }
        auto it = sampling_pmfs.find(node.s);
        if (it == sampling_pmfs.end())
            it = sampling_pmfs.emplace(node.s, all_at_once(k, node.s)).first;
        Rng rng(derive_seed(node.seed, k, 0));
        const std::uint32_t d = sample_degree(it->second, rng);
        for (std::uint32_t m : choose_neighbors(k, d, rng)) {
            NeighborVector v(k);
            v.set(m);
            node.plan.push_back(std::move(v));
        }
    }

    const auto n_adv = static_cast<std::size_t>(std::llround(cfg.sigma * N));
    const auto split = apportion(n_adv, {cfg.mix.silent, cfg.mix.murky, cfg.mix.opaque, cfg.mix.bribery});
    std::vector<std::uint32_t> perm(N);
    std::iota(perm.begin(), perm.end(), 0u);
    Rng arng(derive_seed(seed, 0, kAdversaryStream));
    shuffle(perm, arng);
    std::size_t at = 0;
    const NodeKind kinds[] = {NodeKind::silent, NodeKind::murky, NodeKind::opaque};
    for (int j = 0; j < 3; ++j)
        for (std::size_t n = 0; n < split[j]; ++n)
            net.nodes[perm[at++]].kind = kinds[j];
    bribery_attack(net, split[3]);
    return net;
}

Network build_network(const Chain& chain, const NetworkConfig& cfg)
{
    return build_network(make_context(std::make_shared<const Chain>(chain), cfg.epoch), cfg, cfg.seed);
}

Network random_sampling_baseline(std::shared_ptr<const SimContext> ctx, const NetworkConfig& cfg,
                                 std::uint64_t seed)
{
    NetworkConfig c = cfg;
    c.scheme = Scheme::random_sampling;
    return build_network(std::move(ctx), c, seed);
}

std::vector<Droplet> node_droplets(const Network& net, std::uint32_t node, std::uint32_t epoch)
{
    const SimNode& n = net.nodes.at(node);
    const EpochView& view = net.ctx->views.at(epoch);
    std::vector<Droplet> out;
    switch (n.kind) {
    case NodeKind::silent:
        break;
    case NodeKind::honest:
        for (const NeighborVector& v : n.plan)
            out.push_back(make_droplet(view, v));
        break;
    case NodeKind::opaque: {
        // Consistent but useless: every droplet is the first super-block.
        NeighborVector v(view.k());
        v.set(0);
        for (std::uint32_t j = 0; j < n.plan.size(); ++j)
            out.push_back(make_droplet(view, v));
        break;
    }
    case NodeKind::murky: {
        Rng rng(derive_seed(n.seed, epoch, kMurkyStream));
        for (const NeighborVector& v : n.plan) {
            Droplet d = make_droplet(view, v);
            MurkyMode mode = n.murky_mode;
            if (n.random_murky_mode)
                mode = static_cast<MurkyMode>(uniform_below(rng, 3));
            if (mode != MurkyMode::data) {
                const auto idx = choose_neighbors(view.k(), v.degree(), rng);
                d.neighbors = NeighborVector::from_indices(view.k(), idx);
            }
            if (mode != MurkyMode::vector)
                for (std::uint8_t& b : d.data)
                    if (uniform_below(rng, 2))
                        b = static_cast<std::uint8_t>(uniform_below(rng, 256));
            if (all_zero(xor_padded(d.data, combine(view.super_blocks, d.neighbors)))) {
                if (d.data.empty())
                    d.data.push_back(0);
                d.data[0] ^= 0x01;
            }
            out.push_back(std::move(d));
        }
        break;
    }
    }
    return out;
}

std::vector<Header> node_header_chain(const Network& net, std::uint32_t node)
{
    const SimNode& n = net.nodes.at(node);
    std::vector<Header> h;
    switch (n.kind) {
    case NodeKind::silent:
        break;
    case NodeKind::honest:
        h = net.ctx->headers;
        break;
    case NodeKind::murky:
        // Full length, broken linkage.
        h = net.ctx->headers;
        if (!h.empty())
            h[h.size() / 2].prev_header_hash.bytes[0] ^= 0x01;
        break;
    case NodeKind::opaque:
        // Valid but stale.
        h.assign(net.ctx->headers.begin(), net.ctx->headers.end() - (net.ctx->headers.empty() ? 0 : 1));
        break;
    }
    return h;
}

std::vector<Block> node_tail(const Network& net, std::uint32_t node)
{
    const SimNode& n = net.nodes.at(node);
    if (n.kind == NodeKind::silent)
        return {};
    const Chain& chain = *net.ctx->chain;
    std::vector<Block> tail(chain.blocks.begin() + static_cast<std::ptrdiff_t>(net.ctx->layout->tail_start()),
                            chain.blocks.end());
    if (n.kind != NodeKind::honest && !tail.empty() && !tail.front().txs.front().empty())
        tail.front().txs.front()[0] ^= 0x01;
    return tail;
}

std::size_t bribery_attack(Network& net, std::size_t budget)
{
    std::vector<std::pair<std::size_t, std::uint32_t>> holders;  // (degree-1 count, node)
    for (std::uint32_t i = 0; i < net.size(); ++i) {
        const SimNode& n = net.nodes[i];
        if (n.kind != NodeKind::honest)
            continue;
        const auto ones = static_cast<std::size_t>(std::count_if(
            n.plan.begin(), n.plan.end(), [](const NeighborVector& v) { return v.degree() == 1; }));
        if (ones > 0)
            holders.emplace_back(ones, i);
    }
    std::stable_sort(holders.begin(), holders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const std::size_t n = std::min(budget, holders.size());
    for (std::size_t j = 0; j < n; ++j)
        net.nodes[holders[j].second].kind = NodeKind::silent;
    return n;
}

double BootstrapResult::overhead() const
{
    if (bytes_blockchain == 0)
        return 0;
    return (static_cast<double>(bytes_downloaded) - static_cast<double>(bytes_blockchain)) /
           static_cast<double>(bytes_blockchain);
}

// ---------------------------------------------------------------------------

namespace {

bool tail_valid(const SimContext& ctx, const std::vector<Block>& tail)
{
    const std::uint64_t start = ctx.layout->tail_start();
    if (tail.size() != ctx.headers.size() - start)
        return false;
    for (std::size_t i = 0; i < tail.size(); ++i) {
        const Block& b = tail[i];
        if (b.header != ctx.headers[start + i] || b.txs.empty() || merkle_root(b.txs) != b.header.merkle_root)
            return false;
        if (b.serialize_payload().size() != b.header.payload_size)
            return false;
    }
    return true;
}

std::vector<Block> split_super_block(const Bytes& bytes, const HeaderGroup& group)
{
    std::vector<Block> blocks;
    std::size_t offset = 0;
    for (const Header& h : group) {
        Block b;
        b.header = Header::parse(ByteView(bytes).subspan(offset, kHeaderSize));
        offset += kHeaderSize;
        b.txs = Block::parse_payload(ByteView(bytes).subspan(offset, h.payload_size));
        offset += h.payload_size;
        blocks.push_back(std::move(b));
    }
    return blocks;
}

BootstrapResult run_trial(const Network& net, BootstrapMode mode, BootstrapTrace* trace)
{
    const SimContext& ctx = *net.ctx;
    const NetworkConfig& cfg = net.cfg;
    const std::uint32_t N = net.size();
    BootstrapResult r;
    r.mode = mode;
    r.bytes_blockchain = ctx.chain_bytes();

    std::vector<std::uint32_t> order(N);
    std::iota(order.begin(), order.end(), 0u);
    if (cfg.random_order) {
        Rng orng(derive_seed(net.seed, 0, kOrderStream));
        shuffle(order, orng);
    }

    // Header-chain from a random sample of nodes.
    {
        Rng hrng(derive_seed(net.seed, 0, kHeaderStream));
        const std::uint32_t q = std::min(cfg.header_queries, N);
        std::vector<std::vector<Header>> candidates;
        for (std::uint32_t i : choose_neighbors(N, q, hrng)) {
            auto h = node_header_chain(net, i);
            r.header_bytes += h.size() * kHeaderSize;
            if (!h.empty())
                candidates.push_back(std::move(h));
        }
        try {
            r.header_chain_ok = longest_valid_header_chain(candidates) == ctx.headers;
        } catch (const NoValidChain&) {
            r.header_chain_ok = false;
        }
        if (!r.header_chain_ok)
            return r;
    }

    const std::uint32_t epochs = ctx.epochs();
    std::vector<DecoderState> dec;
    dec.reserve(epochs);
    for (std::uint32_t l = 0; l < epochs; ++l)
        dec.emplace_back(ctx.groups[l], DecodeOptions{}, l);
    auto done = [&] {
        return std::all_of(dec.begin(), dec.end(), [](const DecoderState& d) { return d.complete(); });
    };

    auto contact = [&](std::uint32_t node) {
        ++r.nodes_contacted;
        if (net.nodes[node].kind == NodeKind::honest)
            ++r.honest_contacted;
    };

    std::uint32_t next = 0;
    while (!done() && next < N) {
        const std::uint32_t batch = next == 0 ? cfg.n_initial : cfg.n_hat;
        for (std::uint32_t b = 0; b < batch && next < N; ++b) {
            const std::uint32_t node = order[next++];
            contact(node);
            const SimNode& n = net.nodes[node];
            if (n.kind == NodeKind::silent)
                continue;
            for (std::uint32_t l = 0; l < epochs; ++l) {
                if (dec[l].complete())
                    continue;
                if (mode == BootstrapMode::bulk) {
                    for (Droplet& d : node_droplets(net, node, l)) {
                        r.bytes_downloaded += d.wire_size();
                        ++r.droplets_downloaded;
                        dec[l].add(std::move(d));
                    }
                    continue;
                }
                // As-needed: vectors now, data on demand.
                if (n.kind == NodeKind::honest) {
                    const EpochView* view = &ctx.views[l];
                    for (const NeighborVector& v : n.plan) {
                        r.bytes_downloaded += 4 + 4 + v.bytes().size() + 8;
                        ++r.droplets_downloaded;
                        dec[l].add_pending(l, v, [view, &v] { return combine(view->super_blocks, v); });
                    }
                } else {
                    auto held = std::make_shared<std::vector<Droplet>>(node_droplets(net, node, l));
                    for (std::size_t j = 0; j < held->size(); ++j) {
                        const Droplet& d = (*held)[j];
                        r.bytes_downloaded += 4 + 4 + d.neighbors.bytes().size() + 8;
                        ++r.droplets_downloaded;
                        dec[l].add_pending(d.epoch, d.neighbors, [held, j] { return (*held)[j].data; });
                    }
                }
            }
        }
        for (DecoderState& d : dec)
            d.run();
    }

    for (const DecoderState& d : dec) {
        r.rejections += d.rejected();
        r.xor_ops += d.xor_ops();
        r.bytes_downloaded += d.fetched_bytes();
    }
    if (!done())
        return r;

    // Uncoded tail: previously contacted nodes first, then fresh ones.
    if (ctx.layout->tail_start() < ctx.headers.size()) {
        bool got = false;
        for (std::uint32_t i = 0; i < N && !got; ++i) {
            const std::uint32_t node = order[i];
            if (i >= next) {
                contact(node);
                ++next;
            }
            const auto tail = node_tail(net, node);
            for (const Block& b : tail)
                r.bytes_downloaded += b.serialized_size();
            got = !tail.empty() && tail_valid(ctx, tail);
        }
        if (!got)
            return r;
    }
    r.success = true;

    if (trace) {
        trace->chain.blocks.clear();
        trace->events.clear();
        for (std::uint32_t l = 0; l < epochs; ++l) {
            for (std::uint32_t m = 0; m < dec[l].k(); ++m)
                for (Block& b : split_super_block(*dec[l].block(m), ctx.groups[l][m]))
                    trace->chain.blocks.push_back(std::move(b));
            trace->events.push_back(dec[l].log());
        }
        const Chain& chain = *ctx.chain;
        for (std::uint64_t i = ctx.layout->tail_start(); i < chain.height(); ++i)
            trace->chain.blocks.push_back(chain.blocks[i]);
    }
    return r;
}

} // namespace

BootstrapResult bootstrap(const Network& net, BootstrapTrace* trace)
{
    return run_trial(net, BootstrapMode::bulk, trace);
}

BootstrapResult bootstrap_as_needed(const Network& net, BootstrapTrace* trace)
{
    return run_trial(net, BootstrapMode::as_needed, trace);
}

BootstrapResult run_bootstrap(const Network& net, BootstrapTrace* trace)
{
    return run_trial(net, net.cfg.mode, trace);
}

double measured_savings(const Network& net)
{
    const SimContext& ctx = *net.ctx;
    const auto& spans = ctx.layout->spans();
    const std::uint32_t k = ctx.layout->config().k;
    double total = 0;
    std::size_t honest = 0;
    for (const SimNode& n : net.nodes) {
        if (n.kind != NodeKind::honest)
            continue;
        std::uint64_t stored = 0;
        for (std::uint32_t l = 0; l < ctx.epochs(); ++l)
            for (const NeighborVector& v : n.plan) {
                std::uint64_t len = 0;
                for (std::uint32_t m : v.indices())
                    len = std::max(len, spans[static_cast<std::uint64_t>(l) * k + m].size);
                stored += len;
            }
        if (stored == 0)
            continue;
        total += static_cast<double>(ctx.sealed_bytes) / static_cast<double>(stored);
        ++honest;
    }
    return honest ? total / static_cast<double>(honest) : 0;
}

double empirical_quantile(std::vector<double> values, double q)
{
    if (values.empty())
        return kNeverSucceeded;
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

CostReport measure_bootstrap_cost(std::shared_ptr<const SimContext> ctx, const NetworkConfig& cfg,
                                  double target_prob)
{
    cfg.validate();
    CostReport rep;
    rep.target_prob = target_prob;
    rep.trials.resize(cfg.trials);
    std::vector<double> gammas(cfg.trials, 0);

    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, cfg.trials);
    std::atomic<std::uint32_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (;;) {
            const std::uint32_t t = next.fetch_add(1);
            if (t >= cfg.trials)
                return;
            try {
                const Network net = build_network(ctx, cfg, derive_seed(cfg.seed, t, kTrialStream));
                rep.trials[t] = run_bootstrap(net);
                gammas[t] = measured_savings(net);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure)
                    failure = std::current_exception();
                next = cfg.trials;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);

    std::vector<double> costs;
    std::size_t ok = 0;
    double cost_sum = 0, nodes_sum = 0, overhead_sum = 0;
    rep.cost_min = kNeverSucceeded;
    rep.cost_max = 0;
    for (const BootstrapResult& r : rep.trials) {
        if (!r.success) {
            costs.push_back(kNeverSucceeded);
            continue;
        }
        const double c = r.honest_contacted;
        costs.push_back(c);
        ++ok;
        cost_sum += c;
        nodes_sum += r.nodes_contacted;
        overhead_sum += r.overhead();
        rep.cost_min = std::min(rep.cost_min, c);
        rep.cost_max = std::max(rep.cost_max, c);
    }
    rep.k_hat = empirical_quantile(costs, target_prob);
    rep.success_rate = static_cast<double>(ok) / cfg.trials;
    if (ok) {
        rep.cost_mean = cost_sum / static_cast<double>(ok);
        rep.nodes_mean = nodes_sum / static_cast<double>(ok);
        rep.overhead_mean = overhead_sum / static_cast<double>(ok);
    } else {
        rep.cost_min = rep.cost_mean = rep.cost_max = rep.nodes_mean = rep.overhead_mean = kNeverSucceeded;
    }
    rep.gamma_target = cfg.target_savings();
    rep.gamma_mean = std::accumulate(gammas.begin(), gammas.end(), 0.0) / cfg.trials;
    return rep;
}

Network toy_network()
{
    ChainGenConfig gen;
    gen.n_blocks = 6;
    gen.size_model = FixedSize{64};
    gen.txs_min = 1;
    gen.txs_max = 3;
    gen.rng_seed = 7;
    auto chain = std::make_shared<const Chain>(generate_chain(gen));

    NetworkConfig cfg;
    cfg.N = 9;
    cfg.epoch.k = 6;
    cfg.epoch.s = 1;
    cfg.epoch.tau = 0;
    cfg.pmf = PmfKind::ideal;
    cfg.trials = 1;
    cfg.n_initial = 9;
    cfg.random_order = false;

    Network net;
    net.ctx = make_context(chain, cfg.epoch);
    net.cfg = cfg;
    net.seed = 7;
    const std::vector<std::vector<std::uint32_t>> graph = {
        {2, 3, 5}, {0, 2, 4}, {0, 3}, {2}, {0, 5}, {2, 5}, {1, 4}, {2, 5}, {1, 3},
    };
    for (std::uint32_t i = 0; i < graph.size(); ++i) {
        SimNode node;
        node.seed = derive_seed(net.seed, i, kNodeStream);
        node.s = 1;
        node.plan.push_back(NeighborVector::from_indices(6, graph[i]));
        if (i == 1 || i == 5) {
            node.kind = NodeKind::murky;
            node.murky_mode = MurkyMode::data;
            node.random_murky_mode = false;
        }
        net.nodes.push_back(std::move(node));
    }
    return net;
}

} // namespace sef
