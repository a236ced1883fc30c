// vtl: run scenarios and sweeps, emit metrics CSVs, write the adversarial fixture corpus.
// Exit codes: 0 success, 1 config error, 2 runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include <vtl/config.hpp>
#include <vtl/csv.hpp>
#include <vtl/fixtures.hpp>

namespace {

using namespace vtl;

constexpr int exit_config = 1;
constexpr int exit_runtime = 2;

void write_file(const std::filesystem::path& path, const std::vector<CsvRow>& rows)
{
    std::ofstream out(path, std::ios::binary);
    write_csv(out, rows);
    if (!out)
        throw error("cannot write " + path.string());
}

void write_events(const std::filesystem::path& path, const std::vector<std::string>& events)
{
    std::ofstream out(path, std::ios::binary);
    for (const auto& e : events)
        out << e << '\n';
    if (!out)
        throw error("cannot write " + path.string());
}

void print_summary(const ScenarioConfig& cfg, const Metrics& m)
{
    std::printf("%s N=%u %s param=%g seed=%llu: gAvg=%.3f gMax=%.3f ccptBlocks=%.3f ccptBytes=%.1f txCount=%llu rejected=%llu equivocations=%llu skipped=%llu\n",
        cfg.name.c_str(), cfg.n, std::string(to_string(cfg.topology.kind)).c_str(), cfg.topology_param(),
        static_cast<unsigned long long>(cfg.seed), m.g_avg, m.g_max, m.ccpt_blocks, m.ccpt_bytes,
        static_cast<unsigned long long>(m.tx_count), static_cast<unsigned long long>(m.rejected),
        static_cast<unsigned long long>(m.equivocations), static_cast<unsigned long long>(m.skipped));
}

// Runs one scenario; the event log, when enabled, lands next to `csv` with an .events suffix.
CsvRow run_one(const ScenarioConfig& cfg, log_level level, const std::filesystem::path& csv)
{
    Simulator sim(cfg, level);
    const auto m = sim.run();
    if (level == log_level::events)
        write_events(std::filesystem::path(csv).concat(".events"), sim.events());
    if (level != log_level::off)
        print_summary(cfg, m);
    return make_row(cfg, m);
}

int cmd_run(const std::string& config, const std::string& out, std::optional<std::uint64_t> seed, std::optional<std::uint64_t> rounds)
{
    auto cfg = load_scenario(config);
    if (seed)
        cfg.seed = *seed;
    if (rounds)
        cfg.rounds = *rounds;
    cfg.validate();
    const auto level = log_level_from_env();
    const auto row = run_one(cfg, level, out);
    write_file(out, { row });
    return 0;
}

int cmd_sweep(const std::string& sweep, const std::string& out_dir)
{
    const auto spec = load_sweep(sweep);
    const auto level = log_level_from_env();
    std::filesystem::create_directories(out_dir);
    std::vector<CsvRow> aggregate;
    std::size_t failed = 0;
    for (const auto& point : expand(spec)) {
        const std::string label = point.label.empty() ? "point" : point.label;
        const auto csv = std::filesystem::path(out_dir) / (label + ".csv");
        try {
            std::vector<CsvRow> rows;
            for (const auto& cfg : point.runs)
                rows.push_back(run_one(cfg, level, std::filesystem::path(out_dir) / (label + "_seed" + std::to_string(cfg.seed) + ".csv")));
            write_file(csv, rows);
            aggregate.push_back(mean_row(rows));
        } catch (const std::exception& e) {
            ++failed;
            std::cerr << "point " << label << " failed: " << e.what() << '\n';
        }
    }
    write_file(std::filesystem::path(out_dir) / "aggregate.csv", aggregate);
    if (failed > 0) {
        std::cerr << failed << " sweep point(s) failed\n";
        return exit_runtime;
    }
    return 0;
}

int cmd_fixtures(const std::string& out_dir)
{
    const auto set = build_fixtures();
    write_fixtures(set, out_dir);
    std::printf("wrote %zu fixtures to %s\n", set.fixtures.size(), out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app { "Value-transfer ledger simulator" };
    app.require_subcommand(1);

    std::string config, out, sweep, dir;
    std::optional<std::uint64_t> seed, rounds;

    auto* run = app.add_subcommand("run", "Run one scenario and write a one-row CSV");
    run->add_option("config", config, "Scenario YAML")->required();
    run->add_option("out", out, "Output CSV")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--rounds", rounds, "Override the config round count");

    auto* sw = app.add_subcommand("sweep", "Run a sweep; per-point CSVs plus aggregate.csv");
    sw->add_option("sweep", sweep, "Sweep YAML")->required();
    sw->add_option("outDir", dir, "Output directory")->required();

    auto* fx = app.add_subcommand("fixtures", "Write the adversarial proof-bundle corpus");
    fx->add_option("outDir", dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (*run)
            return cmd_run(config, out, seed, rounds);
        if (*sw)
            return cmd_sweep(sweep, dir);
        return cmd_fixtures(dir);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
}
