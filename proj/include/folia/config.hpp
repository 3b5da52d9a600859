#pragma once

#include "folia/verifier.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace folia {

struct RunConfig {
    std::filesystem::path right_block_path;
    std::filesystem::path left_block_path;
    OrbifoldSpec right_block;
    OrbifoldSpec left_block;
    std::vector<TargetSurface> targets;
    int window = 16;
    int radius = 8;
    int length = 6;
    int depth = 6;
    double tolerance = 1e-9;
    FundamentalDomainMap::Backend backend = FundamentalDomainMap::Backend::PiecewiseLinear;
    unsigned long long seed = 1;
    std::filesystem::path out_dir = "out";

    void validate() const;  // positive depths, targets well formed
};

// JSON block spec: side, genus, generators (matrix literals), cone_points,
// boundary_word, orientation.
OrbifoldSpec load_block_spec(const std::filesystem::path& path);

// Run config (JSON): blocks.right/left paths (relative to the config file),
// targets, window/radius/length/depth/tolerance/backend/seed/out.
RunConfig load_config(const std::filesystem::path& path);

FundamentalDomainMap::Backend parse_backend(const std::string& name);

}  // namespace folia
