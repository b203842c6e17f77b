#include <cmath>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "sef/sim.hpp"

namespace sef {

void SweepConfig::validate() const
{
    if (cells.empty() || sigmas.empty() || schemes.empty() || modes.empty())
        throw ConfigError("sweep grid is empty");
    for (auto [k, s] : cells)
        if (k == 0 || s == 0)
            throw ConfigError("sweep cells need k >= 1 and s >= 1");
    if (cs.empty() || deltas.empty())
        throw ConfigError("sweep needs at least one (c, delta) pair");
    if (epochs == 0)
        throw ConfigError("sweep needs at least one epoch");
    if (payload_bytes < kMinPayloadSize)
        throw ConfigError("payload size below the smallest valid payload");
    if (trials == 0)
        throw ConfigError("trials must be >= 1");
    if (!(target_prob > 0 && target_prob <= 1))
        throw ConfigError("target probability must lie in (0, 1]");
    mix.validate();
}

namespace {

std::string fmt_real(double v)
{
    if (std::isinf(v))
        return "inf";
    return fmt::format("{:.6f}", v);
}

std::string experiment_id(Scheme scheme, BootstrapMode mode, std::uint32_t k, std::uint32_t s,
                          double c, double delta, double sigma)
{
    if (scheme == Scheme::random_sampling)
        return fmt::format("rs-k{}-s{}-sig{:g}-{}", k, s, sigma, to_string(mode));
    return fmt::format("sef-k{}-s{}-c{:g}-d{:g}-sig{:g}-{}", k, s, c, delta, sigma, to_string(mode));
}

} // namespace

SweepReport sweep(const SweepConfig& cfg)
{
    cfg.validate();
    SweepReport report;
    std::map<std::uint32_t, std::shared_ptr<const SimContext>> contexts;

    for (auto [k, s] : cfg.cells) {
        auto& ctx = contexts[k];
        if (!ctx) {
            ChainGenConfig gen;
            gen.n_blocks = static_cast<std::uint64_t>(cfg.epochs) * k;
            gen.size_model = FixedSize{cfg.payload_bytes};
            gen.rng_seed = derive_seed(cfg.seed, k, 0x636861696e);
            EpochConfig ec;
            ec.k = k;
            ec.tau = 0;
            ctx = make_context(std::make_shared<const Chain>(generate_chain(gen)), ec);
        }
        for (Scheme scheme : cfg.schemes)
            for (BootstrapMode mode : cfg.modes)
                for (double sigma : cfg.sigmas) {
                    std::vector<std::pair<double, double>> grid;
                    if (scheme == Scheme::sef) {
                        for (double c : cfg.cs)
                            for (double d : cfg.deltas)
                                grid.emplace_back(c, d);
                    } else {
                        grid.emplace_back(0.0, 0.0);
                    }
                    const std::size_t first = report.rows.size();
                    for (auto [c, delta] : grid) {
                        NetworkConfig nc;
                        nc.epoch.k = k;
                        nc.epoch.s = s;
                        nc.epoch.tau = 0;
                        nc.sigma = sigma;
                        nc.mix = cfg.mix;
                        nc.scheme = scheme;
                        nc.c = c;
                        nc.delta = delta;
                        nc.mode = mode;
                        nc.trials = cfg.trials;
                        nc.threads = cfg.threads;
                        nc.seed = derive_seed(cfg.seed, k, s);
                        if (scheme == Scheme::sef) {
                            try {
                                (void)make_pmf(nc);
                            } catch (const ConfigError&) {
                                continue;
                            }
                        }
                        SweepRow row;
                        row.experiment_id = experiment_id(scheme, mode, k, s, c, delta, sigma);
                        row.scheme = scheme;
                        row.mode = mode;
                        row.k = k;
                        row.s = s;
                        row.c = c;
                        row.delta = delta;
                        row.sigma = sigma;
                        row.report = measure_bootstrap_cost(ctx, nc, cfg.target_prob);
                        report.rows.push_back(std::move(row));
                    }
                    std::size_t best = first;
                    for (std::size_t i = first; i < report.rows.size(); ++i) {
                        const CostReport& a = report.rows[i].report;
                        const CostReport& b = report.rows[best].report;
                        if (std::tie(a.k_hat, a.cost_mean) < std::tie(b.k_hat, b.cost_mean))
                            best = i;
                    }
                    if (best < report.rows.size())
                        report.rows[best].best = true;
                }
    }
    return report;
}

std::vector<std::size_t> SweepReport::best_rows() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].best)
            out.push_back(i);
    return out;
}

std::string SweepReport::trials_csv() const
{
    std::string out =
        "experiment_id,k,s,c,delta,sigma,mode,trial,nodes_contacted,honest_contacted,bytes_down,overhead,success\n";
    for (const SweepRow& row : rows)
        for (std::size_t t = 0; t < row.report.trials.size(); ++t) {
            const BootstrapResult& r = row.report.trials[t];
            out += fmt::format("{},{},{},{:g},{:g},{:g},{},{},{},{},{},{},{}\n", row.experiment_id, row.k,
                               row.s, row.c, row.delta, row.sigma, to_string(row.mode), t, r.nodes_contacted,
                               r.honest_contacted, r.bytes_downloaded, fmt_real(r.overhead()),
                               r.success ? 1 : 0);
        }
    return out;
}

std::string SweepReport::summary_csv() const
{
    std::string out =
        "experiment_id,scheme,mode,k,s,gamma,gamma_ceil,c,delta,sigma,trials,success_rate,k_hat,"
        "cost_mean,cost_min,cost_max,nodes_mean,overhead_mean,gamma_mean,best\n";
    for (const SweepRow& row : rows) {
        const CostReport& r = row.report;
        out += fmt::format("{},{},{},{},{},{},{},{:g},{:g},{:g},{},{},{},{},{},{},{},{},{},{}\n",
                           row.experiment_id, to_string(row.scheme), to_string(row.mode), row.k, row.s,
                           fmt_real(r.gamma_target), static_cast<std::uint64_t>(std::ceil(r.gamma_target)),
                           row.c, row.delta, row.sigma, r.trials.size(), fmt_real(r.success_rate),
                           fmt_real(r.k_hat), fmt_real(r.cost_mean), fmt_real(r.cost_min),
                           fmt_real(r.cost_max), fmt_real(r.nodes_mean), fmt_real(r.overhead_mean),
                           fmt_real(r.gamma_mean), row.best ? 1 : 0);
    }
    return out;
}

} // namespace sef
