#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sef/codec.hpp"
#include "sef/epoch.hpp"
#include "sef/hashchain.hpp"
#include "sef/soliton.hpp"

namespace sef {

enum class NodeKind { honest, silent, murky, opaque };
enum class BootstrapMode { bulk, as_needed };
enum class Scheme { sef, random_sampling };

const char* to_string(NodeKind kind);
const char* to_string(BootstrapMode mode);
const char* to_string(Scheme scheme);
BootstrapMode parse_mode(const std::string& s);
Scheme parse_scheme(const std::string& s);

// Relative weights over adversary behaviors. The bribery share of the
// adversary budget silences honest singleton holders instead of planting
// random adversaries.
struct AdversaryMix {
    double silent = 0;
    double murky = 1;
    double opaque = 0;
    double bribery = 0;

    void validate() const;
};

// How a murky node breaks c = vB.
enum class MurkyMode { data, vector, both };

struct NetworkConfig {
    std::uint32_t N = 0;  // 0 picks a size that comfortably covers the bootstrap
    double sigma = 0;
    AdversaryMix mix;
    EpochConfig epoch;
    // Per-node storage budgets; node i stores s_choices[i % size] droplets per
    // epoch. Empty means every node uses epoch.s.
    std::vector<std::uint32_t> s_choices;
    Scheme scheme = Scheme::sef;
    PmfKind pmf = PmfKind::robust;
    double c = 0.1;
    double delta = 0.5;
    std::uint32_t trials = 100;
    std::uint64_t seed = 1;
    std::uint32_t n_initial = 1;
    std::uint32_t n_hat = 1;
    BootstrapMode mode = BootstrapMode::bulk;
    std::uint32_t header_queries = 25;
    bool random_order = true;  // false contacts nodes by index
    unsigned threads = 0;      // 0 = hardware concurrency

    void validate() const;
    double target_savings() const;
    std::uint32_t max_s() const;
    std::uint32_t node_s(std::uint32_t node) const;
    std::uint32_t resolved_n() const;
};

// Immutable per-chain state shared by every network and trial.
struct SimContext {
    std::shared_ptr<const Chain> chain;
    std::shared_ptr<const EpochLayout> layout;
    std::vector<EpochView> views;                  // one per sealed epoch
    std::vector<std::vector<HeaderGroup>> groups;  // expected headers per epoch
    std::vector<Header> headers;
    std::uint64_t sealed_bytes = 0;
    std::uint64_t tail_bytes = 0;

    std::uint32_t epochs() const { return static_cast<std::uint32_t>(views.size()); }
    std::uint64_t chain_bytes() const { return sealed_bytes + tail_bytes; }
};

// Throws ConfigError if the chain has no sealed epoch under cfg.
std::shared_ptr<const SimContext> make_context(std::shared_ptr<const Chain> chain, const EpochConfig& cfg);

struct SimNode {
    NodeKind kind = NodeKind::honest;
    std::uint64_t seed = 0;
    std::uint32_t s = 1;
    // Per-slot neighbor vectors, reused in every epoch.
    std::vector<NeighborVector> plan;
    MurkyMode murky_mode = MurkyMode::data;
    bool random_murky_mode = true;
};

struct Network {
    std::shared_ptr<const SimContext> ctx;
    NetworkConfig cfg;
    std::uint64_t seed = 0;
    std::vector<SimNode> nodes;

    std::uint32_t size() const { return static_cast<std::uint32_t>(nodes.size()); }
    std::size_t count(NodeKind kind) const;
};

DegreePmf make_pmf(const NetworkConfig& cfg);

// Builds N nodes for one trial. Honest nodes use the same per-slot streams as
// NodeStore sealing. Adversaries are round(sigma * N) uniformly chosen nodes.
Network build_network(std::shared_ptr<const SimContext> ctx, const NetworkConfig& cfg,
                      std::uint64_t seed);
Network build_network(const Chain& chain, const NetworkConfig& cfg);

// What a contacted node hands out for one epoch.
std::vector<Droplet> node_droplets(const Network& net, std::uint32_t node, std::uint32_t epoch);
// Header-chain a node reports; empty for silent nodes.
std::vector<Header> node_header_chain(const Network& net, std::uint32_t node);
// Uncoded tail a node reports.
std::vector<Block> node_tail(const Network& net, std::uint32_t node);

// Silences up to budget honest nodes holding degree-1 droplets, most degree-1
// droplets first, ties by index. Returns how many were silenced.
std::size_t bribery_attack(Network& net, std::size_t budget);

struct BootstrapResult {
    bool success = false;
    bool header_chain_ok = false;
    std::uint32_t nodes_contacted = 0;
    std::uint32_t honest_contacted = 0;
    std::uint64_t droplets_downloaded = 0;
    std::uint64_t bytes_downloaded = 0;
    std::uint64_t bytes_blockchain = 0;
    std::uint64_t header_bytes = 0;
    std::uint64_t rejections = 0;
    std::uint64_t xor_ops = 0;
    BootstrapMode mode = BootstrapMode::bulk;

    double overhead() const;
};

struct BootstrapTrace {
    // Recovered chain on success, byte-exact with the original.
    Chain chain;
    std::vector<std::vector<DecodeEvent>> events;  // per epoch
};

BootstrapResult bootstrap(const Network& net, BootstrapTrace* trace = nullptr);
BootstrapResult bootstrap_as_needed(const Network& net, BootstrapTrace* trace = nullptr);
// Dispatches on net.cfg.mode.
BootstrapResult run_bootstrap(const Network& net, BootstrapTrace* trace = nullptr);

// Network whose nodes store s distinct uncoded blocks per epoch.
Network random_sampling_baseline(std::shared_ptr<const SimContext> ctx, const NetworkConfig& cfg,
                                 std::uint64_t seed);

inline constexpr double kNeverSucceeded = std::numeric_limits<double>::infinity();

struct CostReport {
    std::vector<BootstrapResult> trials;
    double target_prob = 0.99;
    double k_hat = kNeverSucceeded;  // nearest-rank quantile of honest cost
    double cost_mean = 0, cost_min = 0, cost_max = 0;
    double nodes_mean = 0;
    double overhead_mean = 0;
    double success_rate = 0;
    double gamma_target = 0;
    double gamma_mean = 0;  // measured over honest nodes
};

// Nearest-rank q-quantile; infinities stand for failed trials.
double empirical_quantile(std::vector<double> values, double q);

// Runs cfg.trials independent trials on a thread pool. Trial t uses seed
// derive_seed(cfg.seed, t); results do not depend on the thread count.
CostReport measure_bootstrap_cost(std::shared_ptr<const SimContext> ctx, const NetworkConfig& cfg,
                                  double target_prob = 0.99);

// Mean measured storage savings of the honest nodes of a network.
double measured_savings(const Network& net);

// Nine single-droplet nodes over six blocks, nodes 2 and 6 (1-based) murky.
Network toy_network();

// ---------------------------------------------------------------------------
// Sweeps

struct SweepConfig {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cells;  // (k, s)
    std::vector<double> cs{0.01, 0.03, 0.1, 0.3};
    std::vector<double> deltas{0.1, 0.3, 0.5, 0.7};
    std::vector<double> sigmas{0.0};
    std::vector<Scheme> schemes{Scheme::sef};
    std::vector<BootstrapMode> modes{BootstrapMode::bulk};
    AdversaryMix mix;
    std::uint32_t epochs = 1;
    std::uint64_t payload_bytes = 256;
    std::uint32_t trials = 100;
    double target_prob = 0.99;
    std::uint64_t seed = 1;
    unsigned threads = 0;

    void validate() const;
};

struct SweepRow {
    std::string experiment_id;
    Scheme scheme = Scheme::sef;
    BootstrapMode mode = BootstrapMode::bulk;
    std::uint32_t k = 0, s = 0;
    double c = 0, delta = 0, sigma = 0;
    bool best = false;
    CostReport report;
};

struct SweepReport {
    std::vector<SweepRow> rows;

    std::string trials_csv() const;
    std::string summary_csv() const;
    // Indices of the rows picked as best (c, delta) per cell.
    std::vector<std::size_t> best_rows() const;
};

// Cells whose (c, delta) give an invalid robust soliton are skipped.
SweepReport sweep(const SweepConfig& cfg);

} // namespace sef
