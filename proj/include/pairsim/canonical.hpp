#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "pairsim/montecarlo.hpp"

namespace pairsim {

// dotted-path view of a config, numbers in shortest round-trip form;
// keys match the YAML schema
std::map<std::string, std::string> flatten(const SimConfig& cfg, bool with_seed = true);

// FNV-1a over the sorted key=value lines, seed excluded
std::uint64_t config_hash(const SimConfig& cfg);
std::string hash_hex(std::uint64_t h);

} // namespace pairsim
