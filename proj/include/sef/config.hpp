#pragma once

#include <nlohmann/json.hpp>

#include "sef/epoch.hpp"
#include "sef/hashchain.hpp"
#include "sef/sim.hpp"

namespace sef {

// JSON experiment specs. Parsers reject unknown keys and fill defaults;
// the *_to_json functions emit the fully resolved form, which parses back to
// the same value. A section without "seed" inherits the top-level one.
using Json = nlohmann::json;

ChainGenConfig chain_gen_from_json(const Json& j, std::uint64_t default_seed = 0);
Json to_json(const ChainGenConfig& cfg);

EpochConfig epoch_from_json(const Json& j);
Json to_json(const EpochConfig& cfg);

// Network section plus the epoch section it runs over.
NetworkConfig network_from_json(const Json& network, const EpochConfig& epoch, std::uint64_t default_seed = 1);
Json to_json(const NetworkConfig& cfg);  // without the epoch part

SweepConfig sweep_from_json(const Json& j, std::uint64_t default_seed = 1);
Json to_json(const SweepConfig& cfg);

Json to_json(const BootstrapResult& r);
Json to_json(const CostReport& r, bool with_trials);

PmfKind parse_pmf(const std::string& name);

// Parses text, mapping syntax errors to ConfigError.
Json parse_json(const std::string& text);

} // namespace sef
