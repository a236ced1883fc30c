#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <vtl/simulator.hpp>

namespace vtl {

// Frozen column order; the plotting scripts depend on it.
inline constexpr std::string_view csv_header = "scenario,N,topology,param,mode,seed,gAvg,gMax,ccptBlocks,ccptBytes,txCount,rejected,equivocations";

struct CsvRow {
    std::string scenario;
    std::uint32_t n = 0;
    std::string topology;
    double param = 0;
    std::string mode;
    std::uint64_t seed = 0;
    double g_avg = 0;
    double g_max = 0;
    double ccpt_blocks = 0;
    double ccpt_bytes = 0;
    double tx_count = 0;
    double rejected = 0;
    double equivocations = 0;
};

CsvRow make_row(const ScenarioConfig& cfg, const Metrics& m);
// Column-wise mean; identifying columns come from the first row.
CsvRow mean_row(const std::vector<CsvRow>& rows);

// Reals use six decimals; integral counts print without a fraction.
std::string format_row(const CsvRow& row);
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);

} // namespace vtl
