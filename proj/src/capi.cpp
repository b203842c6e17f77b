#include "sef/sef.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <fmt/format.h>

#include "sef/config.hpp"
#include "sef/epoch.hpp"
#include "sef/hashchain.hpp"
#include "sef/sim.hpp"

struct sef_chain {
    std::shared_ptr<const sef::Chain> chain;
};

struct sef_node_store {
    sef::NodeStore store;
};

namespace {

thread_local std::string last_error;

sef_status fail(sef_status status, const char* what)
{
    last_error = what;
    return status;
}

template <class F>
sef_status guarded(F&& f)
{
    last_error.clear();
    try {
        return f();
    } catch (const sef::ConfigError& e) {
        return fail(SEF_ERR_CONFIG, e.what());
    } catch (const sef::NotFinalizedError& e) {
        return fail(SEF_ERR_CONFIG, e.what());
    } catch (const sef::EmptyPayload& e) {
        return fail(SEF_ERR_CONFIG, e.what());
    } catch (const sef::IntegrityError& e) {
        return fail(SEF_ERR_INTEGRITY, e.what());
    } catch (const sef::NoValidChain& e) {
        return fail(SEF_ERR_INTEGRITY, e.what());
    } catch (const sef::ParseError& e) {
        return fail(SEF_ERR_PARSE, e.what());
    } catch (const sef::InsufficientDroplets& e) {
        return fail(SEF_ERR_DECODE_EXHAUSTED, e.what());
    } catch (const sef::IoError& e) {
        return fail(SEF_ERR_IO, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(SEF_ERR_CONFIG, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SEF_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SEF_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SEF_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void put(char** dst, const std::string& s)
{
    if (dst)
        *dst = dup_string(s);
}

sef::Json parse_or_empty(const char* text)
{
    if (!text || !*text)
        return sef::Json::object();
    return sef::parse_json(text);
}

std::uint64_t top_seed(const sef::Json& j, std::uint64_t fallback)
{
    if (j.contains("seed") && !j.at("seed").is_null())
        return j.at("seed").get<std::uint64_t>();
    return fallback;
}

const char* trial_csv_header =
    "experiment_id,k,s,c,delta,sigma,mode,trial,nodes_contacted,honest_contacted,bytes_down,overhead,success\n";

} // namespace

extern "C" {

const char* sef_version(void)
{
    return "0.1.0";
}

const char* sef_last_error(void)
{
    return last_error.c_str();
}

const char* sef_status_name(sef_status status)
{
    switch (status) {
    case SEF_OK: return "ok";
    case SEF_ERR_CONFIG: return "config error";
    case SEF_ERR_INTEGRITY: return "integrity error";
    case SEF_ERR_DECODE_EXHAUSTED: return "decode exhausted";
    case SEF_ERR_PARSE: return "parse error";
    case SEF_ERR_IO: return "i/o error";
    case SEF_ERR_INVALID_ARG: return "invalid argument";
    case SEF_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

sef_status sef_hash(const uint8_t* data, size_t len, uint8_t out[32])
{
    if ((!data && len) || !out)
        return fail(SEF_ERR_INVALID_ARG, "null pointer");
    return guarded([&] {
        const auto d = sef::hash(sef::ByteView(data, len));
        std::memcpy(out, d.bytes.data(), 32);
        return SEF_OK;
    });
}

sef_status sef_chain_generate(const char* config_json, sef_chain** out)
{
    if (!out)
        return fail(SEF_ERR_INVALID_ARG, "null output pointer");
    return guarded([&] {
        const sef::Json j = parse_or_empty(config_json);
        const auto cfg = sef::chain_gen_from_json(j);
        *out = new sef_chain{std::make_shared<const sef::Chain>(sef::generate_chain(cfg))};
        return SEF_OK;
    });
}

sef_status sef_chain_load(const char* path, sef_chain** out)
{
    if (!path || !out)
        return fail(SEF_ERR_INVALID_ARG, "null pointer");
    return guarded([&] {
        *out = new sef_chain{std::make_shared<const sef::Chain>(sef::load_chain(path))};
        return SEF_OK;
    });
}

sef_status sef_chain_store(const sef_chain* chain, const char* path)
{
    if (!chain || !path)
        return fail(SEF_ERR_INVALID_ARG, "null pointer");
    return guarded([&] {
        sef::store_chain(*chain->chain, path);
        return SEF_OK;
    });
}

uint64_t sef_chain_height(const sef_chain* chain)
{
    return chain ? chain->chain->height() : 0;
}

uint64_t sef_chain_size(const sef_chain* chain)
{
    return chain ? chain->chain->serialized_size() : 0;
}

void sef_chain_free(sef_chain* chain)
{
    delete chain;
}

sef_status sef_node_encode(const sef_chain* chain, const char* config_json, sef_node_store** out)
{
    if (!chain || !out)
        return fail(SEF_ERR_INVALID_ARG, "null pointer");
    return guarded([&] {
        const sef::Json j = parse_or_empty(config_json);
        for (const auto& [key, _] : j.items())
            if (key != "epoch" && key != "pmf" && key != "c" && key != "delta" && key != "node_id" && key != "seed")
                throw sef::ConfigError("unknown key '" + key + "' in encode config");
        const sef::EpochConfig ec = sef::epoch_from_json(j.value("epoch", sef::Json::object()));
        sef::NetworkConfig nc;
        nc.epoch = ec;
        nc.c = j.value("c", nc.c);
        nc.delta = j.value("delta", nc.delta);
        nc.pmf = sef::parse_pmf(j.value("pmf", std::string("robust")));
        const sef::DegreePmf dist = sef::make_pmf(nc);

        const sef::EpochLayout layout(chain->chain, ec);
        auto store = sef::make_node_store(j.value("node_id", std::uint64_t{0}), top_seed(j, 0), ec,
                                          {ec.k, nc.c, nc.delta});
        sef::seal_all(store, layout, dist);
        *out = new sef_node_store{std::move(store)};
        return SEF_OK;
    });
}

sef_status sef_node_store_save(const sef_node_store* store, const char* path, const char* provenance_json)
{
    if (!store || !path)
        return fail(SEF_ERR_INVALID_ARG, "null pointer");
    return guarded([&] {
        const std::string prov = provenance_json && *provenance_json ? provenance_json : "null";
        sef::save_node_store(store->store, path, sef::parse_json(prov).dump());
        return SEF_OK;
    });
}

sef_status sef_node_store_load(const char* path, sef_node_store** out)
{
    if (!path || !out)
        return fail(SEF_ERR_INVALID_ARG, "null pointer");
    return guarded([&] {
        *out = new sef_node_store{sef::load_node_store(path)};
        return SEF_OK;
    });
}

sef_status sef_node_store_savings(const sef_node_store* store, sef_savings* out)
{
    if (!store || !out)
        return fail(SEF_ERR_INVALID_ARG, "null pointer");
    return guarded([&] {
        const auto s = sef::storage_savings(store->store);
        *out = {s.gamma, s.gamma_inclusive, s.sealed_chain_bytes, s.droplet_bytes, s.stored_bytes,
                static_cast<uint32_t>(store->store.epochs.size())};
        return SEF_OK;
    });
}

void sef_node_store_free(sef_node_store* store)
{
    delete store;
}

sef_status sef_bootstrap_run(const sef_chain* chain, const char* config_json, char** result_json, char** csv_rows)
{
    if (!result_json)
        return fail(SEF_ERR_INVALID_ARG, "null output pointer");
    return guarded([&] {
        const sef::Json j = parse_or_empty(config_json);
        for (const auto& [key, _] : j.items())
            if (key != "seed" && key != "chain" && key != "epoch" && key != "network" && key != "toy")
                throw sef::ConfigError("unknown key '" + key + "' in bootstrap config");
        const std::uint64_t seed = top_seed(j, 1);
        sef::Json resolved = {{"seed", seed}};
        sef::Json out;
        std::string csv = trial_csv_header;
        bool any_success = false;

        if (j.value("toy", false)) {
            const sef::Network net = sef::toy_network();
            sef::BootstrapTrace trace;
            const sef::BootstrapResult r = sef::bootstrap(net, &trace);
            resolved["toy"] = true;
            out["config"] = resolved;
            out["trials"] = sef::Json::array({sef::to_json(r)});
            sef::Json events = sef::Json::array();
            for (const sef::DecodeEvent& e : trace.events.empty() ? std::vector<sef::DecodeEvent>{} : trace.events[0])
                events.push_back({{"droplet", e.droplet + 1}, {"block", e.slot + 1}, {"accepted", e.accepted}});
            out["events"] = events;
            out["recovered_chain_matches"] = r.success && trace.chain == *net.ctx->chain;
            csv += fmt::format("toy,6,1,,,,bulk,0,{},{},{},{:.6f},{}\n", r.nodes_contacted, r.honest_contacted,
                               r.bytes_downloaded, r.overhead(), r.success ? 1 : 0);
            any_success = r.success;
        } else {
            std::shared_ptr<const sef::Chain> c;
            const sef::EpochConfig ec = sef::epoch_from_json(j.value("epoch", sef::Json::object()));
            if (chain) {
                c = chain->chain;
                resolved["chain"] = {{"height", c->height()},
                                     {"tip", c->blocks.empty() ? std::string() : c->blocks.back().header.digest().hex()}};
            } else {
                auto gen = sef::chain_gen_from_json(j.value("chain", sef::Json::object()), seed);
                if (gen.n_blocks == 0)
                    gen.n_blocks = static_cast<std::uint64_t>(ec.k) + ec.tau;
                c = std::make_shared<const sef::Chain>(sef::generate_chain(gen));
                resolved["chain"] = sef::to_json(gen);
            }
            const sef::NetworkConfig nc = sef::network_from_json(j.value("network", sef::Json::object()), ec, seed);
            resolved["epoch"] = sef::to_json(ec);
            resolved["network"] = sef::to_json(nc);
            const auto ctx = sef::make_context(c, ec);
            const sef::CostReport rep = sef::measure_bootstrap_cost(ctx, nc);
            out["config"] = resolved;
            out["summary"] = sef::to_json(rep, false);
            sef::Json trials = sef::Json::array();
            for (std::size_t t = 0; t < rep.trials.size(); ++t) {
                const auto& r = rep.trials[t];
                trials.push_back(sef::to_json(r));
                csv += fmt::format("bootstrap,{},{},{:g},{:g},{:g},{},{},{},{},{},{:.6f},{}\n", ec.k, ec.s, nc.c,
                                   nc.delta, nc.sigma, sef::to_string(r.mode), t, r.nodes_contacted,
                                   r.honest_contacted, r.bytes_downloaded, r.overhead(), r.success ? 1 : 0);
                any_success = any_success || r.success;
            }
            out["trials"] = std::move(trials);
        }
        put(result_json, out.dump(2) + "\n");
        put(csv_rows, csv);
        if (!any_success) {
            last_error = "no trial recovered the chain before the network was exhausted";
            return SEF_ERR_DECODE_EXHAUSTED;
        }
        return SEF_OK;
    });
}

sef_status sef_sweep_run(const char* config_json, char** trials_csv, char** summary_csv, char** best_json)
{
    return guarded([&] {
        const sef::Json j = parse_or_empty(config_json);
        const sef::SweepConfig cfg = sef::sweep_from_json(j, 1);
        const sef::SweepReport rep = sef::sweep(cfg);
        const std::string spec = sef::to_json(cfg).dump();
        put(trials_csv, "# experiment: " + spec + "\n" + rep.trials_csv());
        put(summary_csv, "# experiment: " + spec + "\n" + rep.summary_csv());
        if (best_json) {
            sef::Json best = sef::Json::array();
            for (std::size_t i : rep.best_rows()) {
                const auto& row = rep.rows[i];
                best.push_back({{"experiment_id", row.experiment_id},
                                {"scheme", sef::to_string(row.scheme)},
                                {"mode", sef::to_string(row.mode)},
                                {"k", row.k},
                                {"s", row.s},
                                {"sigma", row.sigma},
                                {"c", row.c},
                                {"delta", row.delta},
                                {"summary", sef::to_json(row.report, false)}});
            }
            put(best_json, sef::Json({{"config", sef::to_json(cfg)}, {"best", best}}).dump(2) + "\n");
        }
        return SEF_OK;
    });
}

void sef_string_free(char* s)
{
    std::free(s);
}

} // extern "C"
