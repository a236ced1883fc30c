#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <unistd.h>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() / ("vtl-cli-" + std::to_string(::getpid()) + "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text)
    {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    // Exit status of the CLI; stderr lands in err.txt.
    int vtl(const std::string& args)
    {
        const std::string cmd = "VTL_LOG=off " + std::string(VTL_CLI) + " " + args + " >" + (dir_ / "out.txt").string() + " 2>" + (dir_ / "err.txt").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string read(const fs::path& p) const
    {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::string stderr_text() const { return read(dir_ / "err.txt"); }

    fs::path dir_;
};

const char* base = "name: cli\nN: 5\nscheme: test\nrounds: 30\ntopology:\n  kind: ring\n  c: 2\n";

} // namespace

TEST_F(Cli, RunWritesCsv)
{
    const auto cfg = write("a.yaml", base);
    ASSERT_EQ(vtl("run " + cfg.string() + " " + (dir_ / "a.csv").string()), 0) << stderr_text();
    const auto csv = read(dir_ / "a.csv");
    EXPECT_EQ(csv.rfind("scenario,N,topology,param,mode,seed,gAvg", 0), 0u);
    EXPECT_NE(csv.find("\ncli,5,ring,2,noninteractive,1,"), std::string::npos) << csv;
}

TEST_F(Cli, IdenticalRunsIdenticalBytes)
{
    const auto cfg = write("a.yaml", base);
    ASSERT_EQ(vtl("run " + cfg.string() + " " + (dir_ / "1.csv").string() + " --seed 9"), 0);
    ASSERT_EQ(vtl("run " + cfg.string() + " " + (dir_ / "2.csv").string() + " --seed 9"), 0);
    EXPECT_EQ(read(dir_ / "1.csv"), read(dir_ / "2.csv"));
    EXPECT_NE(read(dir_ / "1.csv").find(",9,"), std::string::npos);
}

TEST_F(Cli, EventLogWrittenOnRequest)
{
    const auto cfg = write("a.yaml", base);
    const std::string cmd = "VTL_LOG=events " + std::string(VTL_CLI) + " run " + cfg.string() + " " + (dir_ / "e.csv").string() + " >/dev/null";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_FALSE(read(dir_ / "e.csv.events").empty());
}

TEST_F(Cli, ConfigErrorExitsOneAndNamesField)
{
    const auto cfg = write("bad.yaml", "N: 5\ntopology:\n  kind: ring\n  c: 7\n");
    EXPECT_EQ(vtl("run " + cfg.string() + " " + (dir_ / "x.csv").string()), 1);
    EXPECT_NE(stderr_text().find("topology.c"), std::string::npos) << stderr_text();
    EXPECT_NE(stderr_text().find("bad.yaml:4:"), std::string::npos) << stderr_text();
    EXPECT_FALSE(fs::exists(dir_ / "x.csv"));
}

TEST_F(Cli, BadArgumentsExitOne)
{
    EXPECT_EQ(vtl("frobnicate"), 1);
    EXPECT_EQ(vtl("run"), 1);
    EXPECT_EQ(vtl("run " + (dir_ / "missing.yaml").string() + " x.csv"), 1);
}

TEST_F(Cli, SweepKeepsGoingPastBadPoint)
{
    const auto sweep = write("s.yaml", "base:\n  name: sw\n  N: 5\n  scheme: test\n  rounds: 20\n  topology: {kind: ring, c: 1}\nvary:\n  c: [1, 9, 2]\nrepetitions: 2\n");
    const auto out = dir_ / "out";
    EXPECT_EQ(vtl("sweep " + sweep.string() + " " + out.string()), 2);
    EXPECT_NE(stderr_text().find("c9"), std::string::npos) << stderr_text();
    EXPECT_TRUE(fs::exists(out / "c1.csv"));
    EXPECT_TRUE(fs::exists(out / "c2.csv"));
    EXPECT_FALSE(fs::exists(out / "c9.csv"));
    const auto agg = read(out / "aggregate.csv");
    EXPECT_EQ(std::count(agg.begin(), agg.end(), '\n'), 3);
    const auto c1 = read(out / "c1.csv");
    EXPECT_EQ(std::count(c1.begin(), c1.end(), '\n'), 3);
}

TEST_F(Cli, FixturesWritten)
{
    ASSERT_EQ(vtl("fixtures " + (dir_ / "fx").string()), 0);
    EXPECT_TRUE(fs::exists(dir_ / "fx" / "index.json"));
}

TEST_F(Cli, ShippedConfigsParse)
{
    const fs::path configs = fs::path(VTL_SOURCE_DIR) / "configs";
    std::size_t seen = 0;
    for (const auto& e : fs::directory_iterator(configs)) {
        if (e.path().extension() != ".yaml")
            continue;
        ++seen;
        const bool is_sweep = read(e.path()).find("base:") != std::string::npos;
        if (is_sweep)
            continue;
        EXPECT_EQ(vtl("run " + e.path().string() + " " + (dir_ / "c.csv").string() + " --rounds 5"), 0) << e.path() << stderr_text();
    }
    EXPECT_GT(seen, 0u);
}
