#pragma once

#include <map>
#include <string>
#include <vector>

#include "ril/experiments.hpp"
#include "ril/lattice.hpp"

namespace ril {

// Everything a CLI run needs, resolved from an INI file plus `section.key=value` overrides.
struct RunConfig {
    ExperimentConfig exp;
    std::vector<double> levels;     // disconnect-direct levels; empty means tilt.u
    double comparison_level = -1;   // coupling-check; < 0 means u_** + eps/8
    std::string set_M = "origin";   // origin | pair | box:R | ball:r | file:path
    bool tilted = false;            // capacity, green and sample use the tilted law
    std::string green_flavor = "free";  // free | killed | tilted
    int killed_radius = 10;
    int profile_axis = -1;          // tilt-build rows along the first axis up to this radius (< 0: support + 1)

    // every key with its resolved value, sorted; this is what the manifest hash covers
    std::map<std::string, std::string> resolved;
};

// Reads an INI file (may be empty path) and applies overrides; throws std::invalid_argument naming the
// offending key or violated invariant. Validation happens here, before any computation.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

SiteSet parse_set(const std::string& spec, int d);

// FNV-1a over the resolved configuration, as 16 hex digits
std::string config_hash(const std::string& command, const RunConfig& rc);

}  // namespace ril
