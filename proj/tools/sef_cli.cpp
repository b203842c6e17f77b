// sef: command-line front end over the C API.
//
//   sef gen-chain --config chain.json --out chain.bin
//   sef encode    --chain chain.bin --config node.json --out node.sefstore
//   sef bootstrap --config net.json --out results/ [--mode as-needed] [--toy]
//   sef sweep     --config sweep.json --out results/
//
// Exit codes: 0 success, 1 configuration error, 2 integrity or parse error,
// 3 decoding exhausted the network.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sef/sef.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 1, kIntegrity = 2, kExhausted = 3 };

int exit_code(sef_status st)
{
    switch (st) {
    case SEF_OK: return kOk;
    case SEF_ERR_INTEGRITY:
    case SEF_ERR_PARSE: return kIntegrity;
    case SEF_ERR_DECODE_EXHAUSTED: return kExhausted;
    default: return kConfig;
    }
}

struct CliFailure {
    int code;
    std::string message;
};

void check(sef_status st)
{
    if (st != SEF_OK)
        throw CliFailure{exit_code(st), std::string(sef_status_name(st)) + ": " + sef_last_error()};
}

struct OwnedString {
    char* p = nullptr;
    ~OwnedString() { sef_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

json load_experiment(const std::string& path)
{
    if (path.empty())
        return json::object();
    std::ifstream in(path);
    if (!in)
        throw CliFailure{kConfig, "cannot open config file " + path};
    try {
        json j = json::parse(in);
        if (!j.is_object())
            throw CliFailure{kConfig, "config file must hold a JSON object"};
        return j;
    } catch (const json::exception& e) {
        throw CliFailure{kConfig, std::string("config file: ") + e.what()};
    }
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw CliFailure{kConfig, "cannot write " + path.string()};
}

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

struct RunOptions {
    std::optional<std::uint32_t> trials;
    std::optional<std::string> mode;
    std::optional<std::string> baseline;
};

json base_experiment(const Common& c)
{
    json exp = load_experiment(c.config);
    if (c.seed)
        exp["seed"] = *c.seed;
    return exp;
}

int cmd_gen_chain(const Common& c)
{
    json exp = base_experiment(c);
    json chain_cfg = exp.value("chain", json::object());
    if (exp.contains("seed") && !chain_cfg.contains("seed"))
        chain_cfg["seed"] = exp["seed"];

    sef_chain* chain = nullptr;
    check(sef_chain_generate(chain_cfg.dump().c_str(), &chain));
    std::unique_ptr<sef_chain, decltype(&sef_chain_free)> guard(chain, sef_chain_free);
    check(sef_chain_store(chain, c.out.c_str()));

    json manifest = {{"experiment", exp},
                     {"height", sef_chain_height(chain)},
                     {"bytes", sef_chain_size(chain)}};
    write_text(c.out + ".json", manifest.dump(2) + "\n");
    std::printf("wrote %s: %llu blocks, %llu bytes\n", c.out.c_str(),
                static_cast<unsigned long long>(sef_chain_height(chain)),
                static_cast<unsigned long long>(sef_chain_size(chain)));
    return kOk;
}

int cmd_encode(const Common& c, const std::string& chain_path)
{
    json exp = base_experiment(c);
    std::string path = chain_path.empty() ? exp.value("chain_file", std::string()) : chain_path;
    if (path.empty())
        throw CliFailure{kConfig, "encode needs --chain or \"chain_file\""};
    exp["chain_file"] = path;

    sef_chain* chain = nullptr;
    check(sef_chain_load(path.c_str(), &chain));
    std::unique_ptr<sef_chain, decltype(&sef_chain_free)> chain_guard(chain, sef_chain_free);

    json node_cfg = exp;
    node_cfg.erase("chain_file");
    sef_node_store* store = nullptr;
    check(sef_node_encode(chain, node_cfg.dump().c_str(), &store));
    std::unique_ptr<sef_node_store, decltype(&sef_node_store_free)> store_guard(store, sef_node_store_free);

    check(sef_node_store_save(store, c.out.c_str(), exp.dump().c_str()));
    sef_savings sv{};
    check(sef_node_store_savings(store, &sv));
    std::printf("sealed epochs: %u\n", sv.sealed_epochs);
    std::printf("gamma=%.2f\n", sv.gamma);
    std::printf("gamma_inclusive=%.2f\n", sv.gamma_inclusive);
    std::printf("sealed chain bytes: %llu, droplet bytes: %llu, stored bytes: %llu\n",
                static_cast<unsigned long long>(sv.sealed_chain_bytes),
                static_cast<unsigned long long>(sv.droplet_bytes),
                static_cast<unsigned long long>(sv.stored_bytes));
    return kOk;
}

int cmd_bootstrap(const Common& c, const RunOptions& o, const std::string& chain_path, bool toy)
{
    json exp = base_experiment(c);
    if (toy)
        exp["toy"] = true;
    if (o.trials)
        exp["network"]["trials"] = *o.trials;
    if (o.mode)
        exp["network"]["mode"] = *o.mode;
    if (o.baseline)
        exp["network"]["scheme"] = *o.baseline;
    std::string path = chain_path.empty() ? exp.value("chain_file", std::string()) : chain_path;
    if (!path.empty())
        exp["chain_file"] = path;

    sef_chain* chain = nullptr;
    if (!path.empty())
        check(sef_chain_load(path.c_str(), &chain));
    std::unique_ptr<sef_chain, decltype(&sef_chain_free)> guard(chain, sef_chain_free);

    json run_cfg = exp;
    run_cfg.erase("chain_file");
    OwnedString result, csv;
    const sef_status st = sef_bootstrap_run(chain, run_cfg.dump().c_str(), &result.p, &csv.p);
    if (!result.p)
        check(st);

    json out = json::parse(result.str());
    out["experiment"] = exp;
    const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
    write_text(dir / "bootstrap.json", out.dump(2) + "\n");
    write_text(dir / "bootstrap_trials.csv", "# experiment: " + exp.dump() + "\n" + csv.str());

    if (out.contains("summary")) {
        const json& s = out["summary"];
        std::cout << "trials: " << out["trials"].size() << ", success rate: " << s["success_rate"] << "\n"
                  << "honest nodes at " << s["target_prob"] << ": " << s["k_hat"]
                  << " (optimal " << s["gamma_ceil"] << ")\n"
                  << "mean honest cost: " << s["cost_mean"] << ", mean nodes contacted: " << s["nodes_mean"]
                  << "\nmean bandwidth overhead: " << s["overhead_mean"] << "\n";
    } else {
        const json& t = out["trials"][0];
        std::cout << "success: " << t["success"] << ", rejections: " << t["rejections"]
                  << ", nodes contacted: " << t["nodes_contacted"] << "\n";
        for (const json& e : out["events"])
            std::cout << "  c" << e["droplet"] << " -> B" << e["block"] << (e["accepted"].get<bool>() ? " accepted" : " rejected")
                      << "\n";
    }
    std::cout << "wrote " << (dir / "bootstrap.json").string() << "\n";
    if (st != SEF_OK) {
        std::cerr << "sef: " << sef_status_name(st) << ": " << sef_last_error() << "\n";
        return exit_code(st);
    }
    return kOk;
}

int cmd_sweep(const Common& c, const RunOptions& o)
{
    json exp = base_experiment(c);
    if (o.trials)
        exp["trials"] = *o.trials;
    if (o.mode)
        exp["modes"] = json::array({*o.mode});
    if (o.baseline)
        exp["schemes"] = json::array({*o.baseline});

    OwnedString trials, summary, best;
    check(sef_sweep_run(exp.dump().c_str(), &trials.p, &summary.p, &best.p));

    const fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
    write_text(dir / "trials.csv", trials.str());
    write_text(dir / "summary.csv", summary.str());
    json b = json::parse(best.str());
    b["experiment"] = exp;
    write_text(dir / "best.json", b.dump(2) + "\n");

    for (const json& row : b["best"]) {
        const json& s = row["summary"];
        std::cout << row["scheme"].get<std::string>() << " k=" << row["k"] << " s=" << row["s"]
                  << " sigma=" << row["sigma"] << " " << row["mode"].get<std::string>();
        if (row["scheme"] == "sef")
            std::cout << ": best c=" << row["c"] << " delta=" << row["delta"];
        std::cout << ", K=" << s["k_hat"] << " (optimal " << s["gamma_ceil"] << "), mean " << s["cost_mean"]
                  << ", overhead " << s["overhead_mean"] << "\n";
    }
    std::cout << "wrote " << dir.string() << "/{trials.csv,summary.csv,best.json}\n";
    return kOk;
}

void add_common(CLI::App* sub, Common& c, bool out_required)
{
    sub->add_option("--config", c.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", c.seed, "global seed (overrides the config file)");
    auto* out = sub->add_option("--out", c.out, "output path");
    if (out_required)
        out->required();
}

void add_run(CLI::App* sub, RunOptions& o)
{
    sub->add_option("--trials", o.trials, "number of trials");
    sub->add_option("--mode", o.mode, "download mode")->check(CLI::IsMember({"bulk", "as-needed"}));
    sub->add_option("--baseline", o.baseline, "storage scheme")->check(CLI::IsMember({"sef", "random-sampling"}));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Secure fountain code storage and bootstrap simulator"};
    app.set_version_flag("--version", sef_version());
    app.require_subcommand(1);

    Common gen_c, enc_c, boot_c, sweep_c;
    RunOptions boot_o, sweep_o;
    std::string enc_chain, boot_chain;
    bool toy = false;

    auto* gen = app.add_subcommand("gen-chain", "generate a synthetic chain and write a block-dump file");
    add_common(gen, gen_c, true);

    auto* enc = app.add_subcommand("encode", "seal a chain into one node's droplets");
    add_common(enc, enc_c, true);
    enc->add_option("--chain", enc_chain, "block-dump file");

    auto* boot = app.add_subcommand("bootstrap", "simulate bucket-node bootstrap trials");
    add_common(boot, boot_c, false);
    add_run(boot, boot_o);
    boot->add_option("--chain", boot_chain, "block-dump file (otherwise generated from the config)");
    boot->add_flag("--toy", toy, "run the nine-droplet fixture");

    auto* sw = app.add_subcommand("sweep", "sweep (k, s, c, delta, sigma) and report bootstrap costs");
    add_common(sw, sweep_c, false);
    add_run(sw, sweep_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfig;
    }

    try {
        if (*gen)
            return cmd_gen_chain(gen_c);
        if (*enc)
            return cmd_encode(enc_c, enc_chain);
        if (*boot)
            return cmd_bootstrap(boot_c, boot_o, boot_chain, toy);
        return cmd_sweep(sweep_c, sweep_o);
    } catch (const CliFailure& f) {
        std::cerr << "sef: " << f.message << "\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "sef: " << e.what() << "\n";
        return kConfig;
    }
}
