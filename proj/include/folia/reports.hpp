#pragma once

#include "folia/config.hpp"

#include <filesystem>
#include <string>

namespace folia {

void write_file(const std::filesystem::path& path, const std::string& content);

// CSV artifacts; every file opens with a context line naming the depths and
// tolerances the numbers were computed at.
std::string bisequences_csv(const RealizationPlan& plan, unsigned long long seed);
std::string stabilizer_csv(const StabilizerReport& report, unsigned long long seed);
std::string orbit_csv(const OrbitGraph& graph, unsigned long long seed);
std::string special_points_csv(const std::vector<SpecialPointViolation>& violations, int length_bound,
                               unsigned long long seed);
std::string block_validation_csv(const BlockPair& pair);

std::string plan_text(const RealizationPlan& plan);

// Static schematic: orbit points on the circle, bisequence grid highlighted,
// certified cycle points marked per pairing.
std::string orbit_svg(const OrbitGraph& graph, const GluedAction& action,
                      const RealizationPlan& plan);

}  // namespace folia
