#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <vtl/validation.hpp>

namespace vtl {

// One self-contained proof bundle with the main chain it is judged against.
struct Fixture {
    std::string name;
    std::string description;
    Transaction tx;
    ProofBundle bundle;
    // MainChain::dump() output.
    std::string mainchain;
    proof_verdict expect_proof = proof_verdict::pass;
    reason proof_reason = reason::none;
    verdict expect_validation = verdict::valid;
    reason validation_reason = reason::none;
};

struct FixtureSet {
    std::map<NodeId, PublicKey> keys;
    std::vector<Fixture> fixtures;
};

// Deterministic corpus: honest bundles plus tampered linkage, duplicated target, missing confirmation,
// equality violation, double spend and foreign ownership.
FixtureSet build_fixtures();

// Layout: pubkeys.json, index.json, and per fixture <name>.bundle, <name>.tx (canonical bytes) and
// <name>.mainchain.jsonl.
void write_fixtures(const FixtureSet& set, const std::filesystem::path& dir);

struct FixtureResult {
    std::string name;
    bool ok = false;
    // Observed verdicts, e.g. "pass/valid" or "fail(bad-linkage)".
    std::string observed;
    std::string expected;
};

// Reads a written corpus back from disk and judges every bundle.
std::vector<FixtureResult> check_fixtures(const std::filesystem::path& dir);

} // namespace vtl
