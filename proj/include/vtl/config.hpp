#pragma once

#include <map>
#include <string>
#include <vector>

#include <vtl/simulator.hpp>

namespace vtl {

// Scenario files are YAML. Unknown keys are rejected; every error names the field and, when the field
// exists in the file, its line and column.
ScenarioConfig parse_scenario(const std::string& text, const std::string& origin = "<config>");
ScenarioConfig load_scenario(const std::string& path);

// A sweep varies N, c, p or size over value lists (Cartesian product) and repeats each point with seeds
// base, base+1, ...
struct SweepSpec {
    ScenarioConfig base;
    std::map<std::string, std::vector<double>> vary;
    std::uint32_t repetitions = 1;
};

struct SweepPoint {
    // Stable label such as "N10_c3"; empty when nothing varies.
    std::string label;
    std::vector<ScenarioConfig> runs;
};

SweepSpec parse_sweep(const std::string& text, const std::string& origin = "<sweep>");
SweepSpec load_sweep(const std::string& path);

// Odometer order over the vary keys sorted by name (N before c), last key fastest. Points are not
// validated here; running one reports its config error.
std::vector<SweepPoint> expand(const SweepSpec& spec);

} // namespace vtl
