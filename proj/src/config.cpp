#include "sef/config.hpp"

#include <cmath>
#include <initializer_list>

namespace sef {

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const char* where)
{
    if (!j.is_object())
        throw ConfigError(std::string(where) + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            ok = ok || key == a;
        if (!ok)
            throw ConfigError(std::string("unknown key '") + key + "' in " + where);
    }
}

template <class T>
T get(const Json& j, const char* key, T fallback)
{
    if (!j.contains(key) || j.at(key).is_null())
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw ConfigError(std::string("bad value for '") + key + "'");
    }
}

Json real_or_null(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

} // namespace

Json parse_json(const std::string& text)
{
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
}

PmfKind parse_pmf(const std::string& s)
{
    if (s == "robust")
        return PmfKind::robust;
    if (s == "ideal")
        return PmfKind::ideal;
    if (s == "all-at-once" || s == "all_at_once")
        return PmfKind::all_at_once;
    throw ConfigError("unknown degree distribution '" + s + "'");
}

ChainGenConfig chain_gen_from_json(const Json& j, std::uint64_t default_seed)
{
    check_keys(j, {"n_blocks", "size_model", "txs_min", "txs_max", "max_block_size", "seed"}, "chain");
    ChainGenConfig cfg;
    cfg.n_blocks = get<std::uint64_t>(j, "n_blocks", 0);
    cfg.txs_min = get<std::uint32_t>(j, "txs_min", cfg.txs_min);
    cfg.txs_max = get<std::uint32_t>(j, "txs_max", cfg.txs_max);
    cfg.max_block_size = get<std::uint64_t>(j, "max_block_size", 0);
    cfg.rng_seed = get<std::uint64_t>(j, "seed", default_seed);
    if (j.contains("size_model")) {
        const Json& m = j.at("size_model");
        const auto kind = get<std::string>(m, "kind", "fixed");
        if (kind == "fixed") {
            check_keys(m, {"kind", "payload_bytes"}, "size_model");
            cfg.size_model = FixedSize{get<std::uint64_t>(m, "payload_bytes", 1024)};
        } else if (kind == "uniform") {
            check_keys(m, {"kind", "lo", "hi"}, "size_model");
            cfg.size_model = UniformSize{get<std::uint64_t>(m, "lo", 0), get<std::uint64_t>(m, "hi", 0)};
        } else if (kind == "empirical") {
            check_keys(m, {"kind", "file", "bins"}, "size_model");
            if (m.contains("bins")) {
                EmpiricalSize e;
                for (const Json& b : m.at("bins")) {
                    if (!b.is_array() || b.size() != 3)
                        throw ConfigError("empirical bins are [lo, hi, weight] triples");
                    e.bins.push_back({b[0].get<std::uint64_t>(), b[1].get<std::uint64_t>(), b[2].get<double>()});
                }
                cfg.size_model = std::move(e);
            } else {
                cfg.size_model = EmpiricalSize::load(get<std::string>(m, "file", ""));
            }
        } else {
            throw ConfigError("unknown size model '" + kind + "'");
        }
    }
    return cfg;
}

Json to_json(const ChainGenConfig& cfg)
{
    Json model;
    if (const auto* f = std::get_if<FixedSize>(&cfg.size_model)) {
        model = {{"kind", "fixed"}, {"payload_bytes", f->payload_bytes}};
    } else if (const auto* u = std::get_if<UniformSize>(&cfg.size_model)) {
        model = {{"kind", "uniform"}, {"lo", u->lo}, {"hi", u->hi}};
    } else {
        Json bins = Json::array();
        for (const auto& b : std::get<EmpiricalSize>(cfg.size_model).bins)
            bins.push_back({b.lo, b.hi, b.weight});
        model = {{"kind", "empirical"}, {"bins", bins}};
    }
    return {{"n_blocks", cfg.n_blocks},   {"size_model", model},
            {"txs_min", cfg.txs_min},     {"txs_max", cfg.txs_max},
            {"max_block_size", cfg.max_block_size}, {"seed", cfg.rng_seed}};
}

EpochConfig epoch_from_json(const Json& j)
{
    check_keys(j, {"k", "s", "tau", "superblock_size"}, "epoch");
    EpochConfig cfg;
    cfg.k = get<std::uint32_t>(j, "k", cfg.k);
    cfg.s = get<std::uint32_t>(j, "s", cfg.s);
    cfg.tau = get<std::uint64_t>(j, "tau", cfg.tau);
    if (j.contains("superblock_size") && !j.at("superblock_size").is_null())
        cfg.superblock_size = get<std::uint64_t>(j, "superblock_size", 0);
    cfg.validate();
    return cfg;
}

Json to_json(const EpochConfig& cfg)
{
    return {{"k", cfg.k},
            {"s", cfg.s},
            {"tau", cfg.tau},
            {"superblock_size", cfg.superblock_size ? Json(*cfg.superblock_size) : Json(nullptr)}};
}

namespace {

AdversaryMix mix_from_json(const Json& j)
{
    check_keys(j, {"silent", "murky", "opaque", "bribery"}, "mix");
    AdversaryMix m{0, 0, 0, 0};
    m.silent = get<double>(j, "silent", 0);
    m.murky = get<double>(j, "murky", 0);
    m.opaque = get<double>(j, "opaque", 0);
    m.bribery = get<double>(j, "bribery", 0);
    m.validate();
    return m;
}

Json to_json(const AdversaryMix& m)
{
    return {{"silent", m.silent}, {"murky", m.murky}, {"opaque", m.opaque}, {"bribery", m.bribery}};
}

const char* pmf_name(PmfKind k)
{
    switch (k) {
    case PmfKind::robust: return "robust";
    case PmfKind::ideal: return "ideal";
    case PmfKind::all_at_once: return "all-at-once";
    }
    return "?";
}

} // namespace

NetworkConfig network_from_json(const Json& j, const EpochConfig& epoch, std::uint64_t default_seed)
{
    check_keys(j,
               {"N", "sigma", "mix", "s_choices", "scheme", "pmf", "c", "delta", "trials", "seed", "n_initial",
                "n_hat", "mode", "header_queries", "random_order", "threads"},
               "network");
    NetworkConfig cfg;
    cfg.epoch = epoch;
    cfg.N = get<std::uint32_t>(j, "N", 0);
    cfg.sigma = get<double>(j, "sigma", 0.0);
    if (j.contains("mix"))
        cfg.mix = mix_from_json(j.at("mix"));
    cfg.s_choices = get<std::vector<std::uint32_t>>(j, "s_choices", {});
    cfg.scheme = parse_scheme(get<std::string>(j, "scheme", "sef"));
    cfg.pmf = parse_pmf(get<std::string>(j, "pmf", "robust"));
    cfg.c = get<double>(j, "c", cfg.c);
    cfg.delta = get<double>(j, "delta", cfg.delta);
    cfg.trials = get<std::uint32_t>(j, "trials", cfg.trials);
    cfg.seed = get<std::uint64_t>(j, "seed", default_seed);
    cfg.n_initial = get<std::uint32_t>(j, "n_initial", cfg.n_initial);
    cfg.n_hat = get<std::uint32_t>(j, "n_hat", cfg.n_hat);
    cfg.mode = parse_mode(get<std::string>(j, "mode", "bulk"));
    cfg.header_queries = get<std::uint32_t>(j, "header_queries", cfg.header_queries);
    cfg.random_order = get<bool>(j, "random_order", true);
    cfg.threads = get<unsigned>(j, "threads", 0);
    cfg.validate();
    return cfg;
}

Json to_json(const NetworkConfig& cfg)
{
    return {{"N", cfg.resolved_n()},
            {"sigma", cfg.sigma},
            {"mix", to_json(cfg.mix)},
            {"s_choices", cfg.s_choices},
            {"scheme", to_string(cfg.scheme)},
            {"pmf", pmf_name(cfg.pmf)},
            {"c", cfg.c},
            {"delta", cfg.delta},
            {"trials", cfg.trials},
            {"seed", cfg.seed},
            {"n_initial", cfg.n_initial},
            {"n_hat", cfg.n_hat},
            {"mode", to_string(cfg.mode)},
            {"header_queries", cfg.header_queries},
            {"random_order", cfg.random_order}};
}

SweepConfig sweep_from_json(const Json& j, std::uint64_t default_seed)
{
    check_keys(j,
               {"cells", "cs", "deltas", "sigmas", "schemes", "modes", "mix", "epochs", "payload_bytes", "trials",
                "target_prob", "seed", "threads"},
               "sweep");
    SweepConfig cfg;
    if (j.contains("cells")) {
        for (const Json& c : j.at("cells")) {
            if (c.is_array() && c.size() == 2)
                cfg.cells.emplace_back(c[0].get<std::uint32_t>(), c[1].get<std::uint32_t>());
            else if (c.is_object())
                cfg.cells.emplace_back(get<std::uint32_t>(c, "k", 0), get<std::uint32_t>(c, "s", 0));
            else
                throw ConfigError("sweep cells are [k, s] pairs");
        }
    }
    cfg.cs = get<std::vector<double>>(j, "cs", cfg.cs);
    cfg.deltas = get<std::vector<double>>(j, "deltas", cfg.deltas);
    cfg.sigmas = get<std::vector<double>>(j, "sigmas", cfg.sigmas);
    if (j.contains("schemes")) {
        cfg.schemes.clear();
        for (const auto& s : get<std::vector<std::string>>(j, "schemes", {}))
            cfg.schemes.push_back(parse_scheme(s));
    }
    if (j.contains("modes")) {
        cfg.modes.clear();
        for (const auto& s : get<std::vector<std::string>>(j, "modes", {}))
            cfg.modes.push_back(parse_mode(s));
    }
    if (j.contains("mix"))
        cfg.mix = mix_from_json(j.at("mix"));
    cfg.epochs = get<std::uint32_t>(j, "epochs", cfg.epochs);
    cfg.payload_bytes = get<std::uint64_t>(j, "payload_bytes", cfg.payload_bytes);
    cfg.trials = get<std::uint32_t>(j, "trials", cfg.trials);
    cfg.target_prob = get<double>(j, "target_prob", cfg.target_prob);
    cfg.seed = get<std::uint64_t>(j, "seed", default_seed);
    cfg.threads = get<unsigned>(j, "threads", 0);
    cfg.validate();
    return cfg;
}

Json to_json(const SweepConfig& cfg)
{
    Json cells = Json::array();
    for (auto [k, s] : cfg.cells)
        cells.push_back({k, s});
    Json schemes = Json::array(), modes = Json::array();
    for (Scheme s : cfg.schemes)
        schemes.push_back(to_string(s));
    for (BootstrapMode m : cfg.modes)
        modes.push_back(to_string(m));
    return {{"cells", cells},
            {"cs", cfg.cs},
            {"deltas", cfg.deltas},
            {"sigmas", cfg.sigmas},
            {"schemes", schemes},
            {"modes", modes},
            {"mix", to_json(cfg.mix)},
            {"epochs", cfg.epochs},
            {"payload_bytes", cfg.payload_bytes},
            {"trials", cfg.trials},
            {"target_prob", cfg.target_prob},
            {"seed", cfg.seed}};
}

Json to_json(const BootstrapResult& r)
{
    return {{"success", r.success},
            {"header_chain_ok", r.header_chain_ok},
            {"nodes_contacted", r.nodes_contacted},
            {"honest_contacted", r.honest_contacted},
            {"droplets_downloaded", r.droplets_downloaded},
            {"bytes_downloaded", r.bytes_downloaded},
            {"bytes_blockchain", r.bytes_blockchain},
            {"header_bytes", r.header_bytes},
            {"rejections", r.rejections},
            {"xor_ops", r.xor_ops},
            {"mode", to_string(r.mode)},
            {"overhead", r.overhead()}};
}

Json to_json(const CostReport& r, bool with_trials)
{
    Json j = {{"target_prob", r.target_prob},
              {"k_hat", real_or_null(r.k_hat)},
              {"cost_mean", real_or_null(r.cost_mean)},
              {"cost_min", real_or_null(r.cost_min)},
              {"cost_max", real_or_null(r.cost_max)},
              {"nodes_mean", real_or_null(r.nodes_mean)},
              {"overhead_mean", real_or_null(r.overhead_mean)},
              {"success_rate", r.success_rate},
              {"gamma_target", r.gamma_target},
              {"gamma_ceil", std::ceil(r.gamma_target)},
              {"gamma_mean", r.gamma_mean}};
    if (with_trials) {
        Json trials = Json::array();
        for (const BootstrapResult& t : r.trials)
            trials.push_back(to_json(t));
        j["trials"] = std::move(trials);
    }
    return j;
}

} // namespace sef
