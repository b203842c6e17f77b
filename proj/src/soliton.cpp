#include "sef/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sef/common.hpp"

namespace sef {

void DegreePmf::finish()
{
    cdf_.resize(probs_.size());
    double acc = 0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        acc += probs_[i];
        cdf_[i] = acc;
    }
    // Guard against the running sum landing a hair below 1.
    cdf_.back() = 1.0;
}

double DegreePmf::mean() const
{
    double m = 0;
    for (std::size_t i = 0; i < probs_.size(); ++i)
        m += static_cast<double>(i + 1) * probs_[i];
    return m;
}

std::uint32_t DegreePmf::sample(Rng& rng) const
{
    const double u = uniform01(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    auto idx = static_cast<std::uint32_t>(it - cdf_.begin());
    idx = std::min(idx, k() - 1);
    // Zero-mass degrees share their predecessor's cdf value and are never hit
    // by upper_bound, except through the clamp above.
    while (probs_[idx] == 0 && idx > 0)
        --idx;
    return idx + 1;
}

namespace {
std::vector<double> ideal_rho(std::uint32_t k)
{
    std::vector<double> rho(k);
    rho[0] = 1.0 / k;
    for (std::uint32_t d = 2; d <= k; ++d)
        rho[d - 1] = 1.0 / (static_cast<double>(d) * (d - 1));
    return rho;
}
} // namespace

DegreePmf ideal_soliton(std::uint32_t k)
{
    if (k == 0)
        throw ConfigError("soliton support size k must be >= 1");
    DegreePmf pmf;
    pmf.kind_ = PmfKind::ideal;
    pmf.rho_ = ideal_rho(k);
    pmf.theta_.assign(k, 0.0);
    pmf.probs_ = pmf.rho_;
    pmf.finish();
    return pmf;
}

DegreePmf robust_soliton(const SolitonParams& params)
{
    const std::uint32_t k = params.k;
    if (k == 0)
        throw ConfigError("soliton support size k must be >= 1");
    if (!(params.c > 0) || !std::isfinite(params.c))
        throw ConfigError("robust soliton requires c > 0");
    if (!(params.delta > 0 && params.delta < 1))
        throw ConfigError("robust soliton requires 0 < delta < 1");

    const double kd = static_cast<double>(k);
    const double R = params.c * std::sqrt(kd) * std::log(kd / params.delta);
    const double spike_real = std::round(kd / R);
    if (!(spike_real >= 1 && spike_real <= kd))
        throw ConfigError("robust soliton spike k/R = " + std::to_string(kd / R) +
                          " rounds outside [1, k]; adjust c or delta");
    const auto spike = static_cast<std::uint32_t>(spike_real);

    DegreePmf pmf;
    pmf.kind_ = PmfKind::robust;
    pmf.c_ = params.c;
    pmf.delta_ = params.delta;
    pmf.R_ = R;
    pmf.spike_ = spike;
    pmf.rho_ = ideal_rho(k);
    pmf.theta_.assign(k, 0.0);
    for (std::uint32_t d = 1; d < spike; ++d)
        pmf.theta_[d - 1] = R / (static_cast<double>(d) * kd);
    pmf.theta_[spike - 1] = R / kd * std::log(R / params.delta);
    if (pmf.theta_[spike - 1] < 0)
        throw ConfigError("robust soliton spike mass is negative (R < delta)");

    // Sum in increasing order of magnitude for a tight normalization.
    std::vector<double> terms(k);
    for (std::uint32_t i = 0; i < k; ++i)
        terms[i] = pmf.rho_[i] + pmf.theta_[i];
    std::vector<double> sorted = terms;
    std::sort(sorted.begin(), sorted.end());
    pmf.beta_ = std::accumulate(sorted.begin(), sorted.end(), 0.0);

    pmf.probs_.resize(k);
    for (std::uint32_t i = 0; i < k; ++i)
        pmf.probs_[i] = terms[i] / pmf.beta_;
    pmf.finish();
    return pmf;
}

DegreePmf all_at_once(std::uint32_t k, std::uint32_t s)
{
    if (k == 0 || s == 0 || s > k)
        throw ConfigError("all-at-once requires 1 <= s <= k");
    DegreePmf pmf;
    pmf.kind_ = PmfKind::all_at_once;
    pmf.point_ = s;
    pmf.probs_.assign(k, 0.0);
    pmf.probs_[s - 1] = 1.0;
    pmf.finish();
    return pmf;
}

} // namespace sef
