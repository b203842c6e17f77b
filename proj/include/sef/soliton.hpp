#pragma once

#include <cstdint>
#include <vector>

#include "sef/rng.hpp"

namespace sef {

struct SolitonParams {
    std::uint32_t k = 0;
    double c = 0.1;
    double delta = 0.5;
};

enum class PmfKind { ideal, robust, all_at_once };

// Probability mass function on degrees {1..k}; probs()[d-1] = P(degree = d).
class DegreePmf {
public:
    std::uint32_t k() const { return static_cast<std::uint32_t>(probs_.size()); }
    PmfKind kind() const { return kind_; }
    const std::vector<double>& probs() const { return probs_; }
    double operator()(std::uint32_t d) const { return probs_.at(d - 1); }
    double mean() const;

    // Robust soliton only.
    double c() const { return c_; }
    double delta() const { return delta_; }
    double spike_R() const { return R_; }
    double beta() const { return beta_; }
    std::uint32_t spike_degree() const { return spike_; }
    // Unnormalized components.
    const std::vector<double>& rho() const { return rho_; }
    const std::vector<double>& theta() const { return theta_; }

    // All-at-once only.
    std::uint32_t point() const { return point_; }

    // Inverse-CDF sampling: one uniform draw per call.
    std::uint32_t sample(Rng& rng) const;

    friend DegreePmf ideal_soliton(std::uint32_t k);
    friend DegreePmf robust_soliton(const SolitonParams& params);
    friend DegreePmf all_at_once(std::uint32_t k, std::uint32_t s);

private:
    void finish();

    PmfKind kind_ = PmfKind::ideal;
    std::vector<double> probs_;
    std::vector<double> cdf_;
    std::vector<double> rho_;
    std::vector<double> theta_;
    double c_ = 0, delta_ = 0, R_ = 0, beta_ = 1;
    std::uint32_t spike_ = 0;
    std::uint32_t point_ = 0;
};

DegreePmf ideal_soliton(std::uint32_t k);

// R = c * sqrt(k) * ln(k / delta); spike at round(k / R). Throws ConfigError
// when the spike falls outside [1, k].
DegreePmf robust_soliton(const SolitonParams& params);

DegreePmf all_at_once(std::uint32_t k, std::uint32_t s);

inline std::uint32_t sample_degree(const DegreePmf& pmf, Rng& rng)
{
    return pmf.sample(rng);
}

} // namespace sef
