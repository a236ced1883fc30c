#include <vtl/fixtures.hpp>

#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

namespace vtl {

namespace {

constexpr std::uint64_t fixture_seed = 20180521;
constexpr amount_t fixture_value = 100;

TxId at(std::uint32_t u, height_t h, std::uint32_t l)
{
    return TxId { NodeId { u }, h, l };
}

Transaction tx(std::vector<TxId> srcs, std::uint32_t from, std::uint32_t to, amount_t amount, amount_t rem)
{
    return Transaction(std::move(srcs), NodeId { from }, NodeId { to }, amount, rem);
}

// Three nodes with genesis abstracts sealed in round 1.
class World {
public:
    World()
    {
        for (std::uint32_t i = 1; i <= 3; ++i) {
            const NodeId id { i };
            keys_.emplace(id, KeyPair::derive(id, fixture_seed, sig_scheme::ed25519));
            pki_.add(id, keys_.at(id).public_key());
            chains_.emplace(id, IndividualChain(id, fixture_value));
        }
        log_ = std::make_unique<MainChain>(pki_);
        for (std::uint32_t i = 1; i <= 3; ++i)
            confirm(i, 1);
        log_->seal();
    }

    void append(std::uint32_t u, std::vector<Transaction> txs) { chains_.at(NodeId { u }).append_block(std::move(txs)); }

    void confirm(std::uint32_t u, height_t h)
    {
        const NodeId id { u };
        log_->submit(make_abstract(keys_.at(id), *chains_.at(id).at(h)));
    }

    void seal() { log_->seal(); }

    BlockPtr block(std::uint32_t u, height_t h) const { return chains_.at(NodeId { u }).ptr_at(h); }

    // Every block of the listed chains up to the given heights.
    ProofBundle bundle(const TxId& target, std::initializer_list<std::pair<std::uint32_t, height_t>> upto) const
    {
        ProofBundle p;
        p.target = target;
        for (const auto& [u, top] : upto) {
            for (height_t h = 1; h <= top; ++h)
                p.add(block(u, h));
        }
        return p;
    }

    const Transaction& tx_at(const TxId& id) const { return *chains_.at(id.sender).at(id.height)->tx_at(id.index); }

    std::string dump() const
    {
        std::ostringstream os;
        log_->dump(os);
        return os.str();
    }

    std::map<NodeId, PublicKey> public_keys() const
    {
        std::map<NodeId, PublicKey> out;
        for (const auto& [id, k] : keys_)
            out.emplace(id, k.public_key());
        return out;
    }

private:
    Pki pki_;
    std::map<NodeId, KeyPair> keys_;
    std::map<NodeId, IndividualChain> chains_;
    std::unique_ptr<MainChain> log_;
};

Fixture make(std::string name, std::string description, const World& w, const TxId& target, ProofBundle bundle)
{
    Fixture f;
    f.name = std::move(name);
    f.description = std::move(description);
    f.tx = w.tx_at(target);
    f.bundle = std::move(bundle);
    f.mainchain = w.dump();
    return f;
}

std::string outcome(proof_verdict p, reason pr, verdict v, reason vr)
{
    std::string s { to_string(p) };
    if (p == proof_verdict::fail)
        return s + "(" + std::string(to_string(pr)) + ")";
    s += "/" + std::string(to_string(v));
    if (v == verdict::unknown)
        s += "(" + std::string(to_string(vr)) + ")";
    return s;
}

void write_bytes(const std::filesystem::path& p, std::span<const std::uint8_t> data)
{
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out)
        throw error("cannot write " + p.string());
}

bytes read_bytes(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw error("cannot read " + p.string());
    return bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

} // namespace

FixtureSet build_fixtures()
{
    FixtureSet set;
    const auto a = tx({ at(1, 1, 1) }, 1, 2, 30, 70);

    {
        World w;
        w.append(1, { a });
        w.confirm(1, 2);
        w.seal();
        set.keys = w.public_keys();
        set.fixtures.push_back(make("honest", "single spend of a genesis value", w, at(1, 2, 1), w.bundle(at(1, 2, 1), { { 1, 2 } })));
    }
    {
        World w;
        w.append(1, { a });
        w.confirm(1, 2);
        w.seal();
        w.append(2, { tx({ at(1, 2, 1) }, 2, 3, 20, 10) });
        w.confirm(2, 2);
        w.seal();
        set.fixtures.push_back(make("honest-two-hop", "receiver passes part of a received value on", w, at(2, 2, 1), w.bundle(at(2, 2, 1), { { 1, 2 }, { 2, 2 } })));
    }
    {
        // Only height 3 is on the main chain; height 2 is confirmed through linkage and is then altered.
        World w;
        w.append(1, { a });
        w.append(1, { tx({ at(1, 2, 1) }, 1, 3, 10, 60) });
        w.confirm(1, 3);
        w.seal();
        auto f = make("tampered-linkage", "block 2 rewritten after block 3 was sealed", w, at(1, 2, 1), w.bundle(at(1, 2, 1), { { 1, 3 } }));
        const auto forged = tx({ at(1, 1, 1) }, 1, 2, 31, 69);
        f.bundle.add(std::make_shared<const Block>(NodeId { 1 }, 2, w.block(1, 2)->prev_hash(), std::vector<Transaction> { forged }));
        f.tx = forged;
        f.expect_proof = proof_verdict::fail;
        f.proof_reason = reason::bad_linkage;
        set.fixtures.push_back(std::move(f));
    }
    {
        World w;
        w.append(1, { a, a });
        w.confirm(1, 2);
        w.seal();
        auto f = make("duplicate-target", "the same transaction twice in one block", w, at(1, 2, 1), w.bundle(at(1, 2, 1), { { 1, 2 } }));
        f.expect_proof = proof_verdict::fail;
        f.proof_reason = reason::duplicate_target;
        set.fixtures.push_back(std::move(f));
    }
    {
        World w;
        w.append(1, { a });
        w.seal();
        auto f = make("missing-confirmation", "no abstract at or above the target height", w, at(1, 2, 1), w.bundle(at(1, 2, 1), { { 1, 2 } }));
        f.expect_proof = proof_verdict::fail;
        f.proof_reason = reason::unconfirmed;
        set.fixtures.push_back(std::move(f));
    }
    {
        World w;
        w.append(1, { tx({ at(1, 1, 1) }, 1, 2, 30, 80) });
        w.confirm(1, 2);
        w.seal();
        auto f = make("equality-violation", "outputs exceed the source by 10", w, at(1, 2, 1), w.bundle(at(1, 2, 1), { { 1, 2 } }));
        f.expect_validation = verdict::unknown;
        f.validation_reason = reason::equality;
        set.fixtures.push_back(std::move(f));
    }
    {
        World w;
        w.append(1, { a });
        w.append(1, { tx({ at(1, 1, 1) }, 1, 3, 50, 50) });
        w.confirm(1, 3);
        w.seal();
        auto f = make("double-spend", "genesis value spent again one block later", w, at(1, 3, 1), w.bundle(at(1, 3, 1), { { 1, 3 } }));
        f.expect_validation = verdict::unknown;
        f.validation_reason = reason::double_spend;
        set.fixtures.push_back(std::move(f));
    }
    {
        World w;
        w.append(2, { tx({ at(1, 1, 1) }, 2, 3, 50, 50) });
        w.confirm(2, 2);
        w.seal();
        auto f = make("foreign-source", "spends another node's genesis value", w, at(2, 2, 1), w.bundle(at(2, 2, 1), { { 1, 1 }, { 2, 2 } }));
        f.expect_validation = verdict::unknown;
        f.validation_reason = reason::ownership;
        set.fixtures.push_back(std::move(f));
    }
    return set;
}

void write_fixtures(const FixtureSet& set, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json keys = nlohmann::ordered_json::object();
    for (const auto& [id, pk] : set.keys)
        keys[std::to_string(id.value)] = { { "scheme", std::string(to_string(pk.scheme)) }, { "key", to_hex(pk.key) } };
    {
        std::ofstream out(dir / "pubkeys.json");
        out << keys.dump(2) << '\n';
    }

    nlohmann::ordered_json index = nlohmann::ordered_json::array();
    for (const auto& f : set.fixtures) {
        write_bytes(dir / (f.name + ".bundle"), encode_bundle(f.bundle));
        write_bytes(dir / (f.name + ".tx"), canonical_encode(f.tx));
        {
            std::ofstream out(dir / (f.name + ".mainchain.jsonl"), std::ios::binary);
            out << f.mainchain;
        }
        index.push_back({
            { "name", f.name },
            { "description", f.description },
            { "bundle", f.name + ".bundle" },
            { "tx", f.name + ".tx" },
            { "mainchain", f.name + ".mainchain.jsonl" },
            { "expect", outcome(f.expect_proof, f.proof_reason, f.expect_validation, f.validation_reason) },
        });
    }
    std::ofstream out(dir / "index.json");
    out << index.dump(2) << '\n';
    if (!out)
        throw error("cannot write " + (dir / "index.json").string());
}

std::vector<FixtureResult> check_fixtures(const std::filesystem::path& dir)
{
    nlohmann::json keys;
    nlohmann::json index;
    {
        std::ifstream in(dir / "pubkeys.json");
        keys = nlohmann::json::parse(in);
    }
    {
        std::ifstream in(dir / "index.json");
        index = nlohmann::json::parse(in);
    }
    Pki pki;
    for (const auto& [id, entry] : keys.items()) {
        PublicKey pk;
        pk.scheme = parse_sig_scheme(entry.at("scheme").get<std::string>());
        pk.key = from_hex(entry.at("key").get<std::string>());
        pki.add(NodeId { static_cast<std::uint32_t>(std::stoul(id)) }, std::move(pk));
    }

    std::vector<FixtureResult> results;
    for (const auto& entry : index) {
        FixtureResult r;
        r.name = entry.at("name").get<std::string>();
        r.expected = entry.at("expect").get<std::string>();
        const auto bundle = decode_bundle(read_bytes(dir / entry.at("bundle").get<std::string>()));
        const auto raw = read_bytes(dir / entry.at("tx").get<std::string>());
        Decoder dec { raw };
        const auto claimed = dec.transaction();
        std::ifstream mc(dir / entry.at("mainchain").get<std::string>());
        const auto log = replay_mainchain(pki, load_mainchain_dump(mc));

        const auto proof = verify_proof(bundle, log, pki);
        const auto v = validate(claimed, bundle, log, pki);
        r.observed = outcome(proof.result, proof.why, v.result, v.why);
        r.ok = r.observed == r.expected;
        results.push_back(std::move(r));
    }
    return results;
}

} // namespace vtl
