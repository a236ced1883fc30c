#include <vtl/csv.hpp>

#include <cmath>
#include <cstdio>

namespace vtl {

namespace {

std::string fixed(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string number(double v)
{
    if (std::nearbyint(v) == v && std::fabs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

CsvRow make_row(const ScenarioConfig& cfg, const Metrics& m)
{
    CsvRow r;
    r.scenario = cfg.name;
    r.n = cfg.n;
    r.topology = std::string(to_string(cfg.topology.kind));
    r.param = cfg.topology_param();
    r.mode = std::string(to_string(cfg.mode));
    r.seed = cfg.seed;
    r.g_avg = m.g_avg;
    r.g_max = m.g_max;
    r.ccpt_blocks = m.ccpt_blocks;
    r.ccpt_bytes = m.ccpt_bytes;
    r.tx_count = static_cast<double>(m.tx_count);
    r.rejected = static_cast<double>(m.rejected);
    r.equivocations = static_cast<double>(m.equivocations);
    return r;
}

CsvRow mean_row(const std::vector<CsvRow>& rows)
{
    if (rows.empty())
        throw error("mean_row: no rows");
    CsvRow out = rows.front();
    const double k = static_cast<double>(rows.size());
    auto mean = [&](double CsvRow::*field) {
        double s = 0;
        for (const auto& r : rows)
            s += r.*field;
        out.*field = s / k;
    };
    for (auto f : { &CsvRow::g_avg, &CsvRow::g_max, &CsvRow::ccpt_blocks, &CsvRow::ccpt_bytes, &CsvRow::tx_count, &CsvRow::rejected, &CsvRow::equivocations })
        mean(f);
    return out;
}

std::string format_row(const CsvRow& r)
{
    std::string s;
    s += r.scenario + ',' + std::to_string(r.n) + ',' + r.topology + ',' + number(r.param) + ',' + r.mode + ',' + std::to_string(r.seed);
    for (double v : { r.g_avg, r.g_max, r.ccpt_blocks, r.ccpt_bytes })
        s += ',' + fixed(v);
    for (double v : { r.tx_count, r.rejected, r.equivocations })
        s += ',' + (std::nearbyint(v) == v ? number(v) : fixed(v));
    return s;
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows)
{
    out << csv_header << '\n';
    for (const auto& r : rows)
        out << format_row(r) << '\n';
}

} // namespace vtl
