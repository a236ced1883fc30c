#include <filesystem>
#include <fstream>

#include <unistd.h>

#include <gtest/gtest.h>

#include <vtl/fixtures.hpp>

using namespace vtl;

namespace {

std::filesystem::path scratch(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("vtl-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST(Fixtures, CorpusCoversEveryCase)
{
    const auto set = build_fixtures();
    std::vector<std::string> names;
    for (const auto& f : set.fixtures)
        names.push_back(f.name);
    const std::vector<std::string> want { "honest", "honest-two-hop", "tampered-linkage", "duplicate-target", "missing-confirmation",
        "equality-violation", "double-spend", "foreign-source" };
    EXPECT_EQ(names, want);
    EXPECT_EQ(set.keys.size(), 3u);
}

TEST(Fixtures, InMemoryVerdictsMatchExpectations)
{
    for (const auto& f : build_fixtures().fixtures) {
        std::istringstream in(f.mainchain);
        const auto set = build_fixtures();
        Pki pki;
        for (const auto& [id, pk] : set.keys)
            pki.add(id, pk);
        const auto log = replay_mainchain(pki, load_mainchain_dump(in));
        const auto proof = verify_proof(f.bundle, log, pki);
        EXPECT_EQ(proof.result, f.expect_proof) << f.name;
        if (!proof.passed()) {
            EXPECT_EQ(proof.why, f.proof_reason) << f.name;
            continue;
        }
        const auto v = validate(f.tx, f.bundle, log, pki);
        EXPECT_EQ(v.result, f.expect_validation) << f.name;
        EXPECT_EQ(v.why, f.validation_reason) << f.name;
    }
}

TEST(Fixtures, WrittenCorpusChecksOut)
{
    const auto dir = scratch("fixtures");
    write_fixtures(build_fixtures(), dir);
    EXPECT_TRUE(std::filesystem::exists(dir / "pubkeys.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "index.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "honest.bundle"));
    EXPECT_TRUE(std::filesystem::exists(dir / "honest.mainchain.jsonl"));
    const auto results = check_fixtures(dir);
    EXPECT_EQ(results.size(), 8u);
    for (const auto& r : results)
        EXPECT_TRUE(r.ok) << r.name << ": observed " << r.observed << ", expected " << r.expected;
    std::filesystem::remove_all(dir);
}

TEST(Fixtures, CorruptedBundleOnDiskIsCaught)
{
    const auto dir = scratch("fixtures-corrupt");
    write_fixtures(build_fixtures(), dir);
    {
        std::fstream f(dir / "honest.bundle", std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(-5, std::ios::end);
        char c;
        f.read(&c, 1);
        f.seekp(-5, std::ios::end);
        c = static_cast<char>(c ^ 0x40);
        f.write(&c, 1);
    }
    bool honest_ok = true;
    try {
        for (const auto& r : check_fixtures(dir))
            if (r.name == "honest")
                honest_ok = r.ok;
    } catch (const error&) {
        honest_ok = false;
    }
    EXPECT_FALSE(honest_ok);
    std::filesystem::remove_all(dir);
}

TEST(Fixtures, BuildIsDeterministic)
{
    const auto a = build_fixtures();
    const auto b = build_fixtures();
    ASSERT_EQ(a.fixtures.size(), b.fixtures.size());
    for (std::size_t i = 0; i < a.fixtures.size(); ++i) {
        EXPECT_EQ(encode_bundle(a.fixtures[i].bundle), encode_bundle(b.fixtures[i].bundle));
        EXPECT_EQ(a.fixtures[i].mainchain, b.fixtures[i].mainchain);
    }
}
