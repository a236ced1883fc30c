#pragma once

#include <map>
#include <memory>

#include <vtl/mainchain.hpp>
#include <vtl/oracle.hpp>
#include <vtl/validation.hpp>

namespace vtl::testing {

inline TxId at(std::uint32_t u, height_t h, std::uint32_t l)
{
    return TxId { NodeId { u }, h, l };
}

inline Transaction tx(std::vector<TxId> srcs, std::uint32_t from, std::uint32_t to, amount_t amount, amount_t rem)
{
    return Transaction(std::move(srcs), NodeId { from }, NodeId { to }, amount, rem);
}

// Hand-built ledger: n nodes with genesis value v, genesis abstracts sealed as round 1.
class Ledger {
public:
    explicit Ledger(std::uint32_t n, amount_t v = 100, sig_scheme scheme = sig_scheme::test_keyed)
    {
        for (std::uint32_t i = 1; i <= n; ++i) {
            const NodeId id { i };
            keys.emplace(id, KeyPair::derive(id, 42, scheme));
            pki.add(id, keys.at(id).public_key());
            chains.emplace(id, IndividualChain(id, v));
        }
        log = std::make_unique<MainChain>(pki);
        for (std::uint32_t i = 1; i <= n; ++i)
            confirm(i, 1);
        log->seal();
    }

    IndividualChain& chain(std::uint32_t u) { return chains.at(NodeId { u }); }
    const Block& append(std::uint32_t u, std::vector<Transaction> txs) { return chain(u).append_block(std::move(txs)); }
    void confirm(std::uint32_t u, height_t h) { log->submit(make_abstract(keys.at(NodeId { u }), *chain(u).at(h))); }
    void seal() { log->seal(); }

    // Appends, submits and seals in one go.
    const Block& commit(std::uint32_t u, std::vector<Transaction> txs)
    {
        const auto& b = append(u, std::move(txs));
        confirm(u, b.height());
        seal();
        return b;
    }

    ProofBundle everything(const TxId& target) const
    {
        ProofBundle p;
        p.target = target;
        for (const auto& [id, c] : chains)
            for (const auto& b : c.blocks())
                p.add(b);
        return p;
    }

    const Transaction& tx_at(const TxId& id) const { return *chains.at(id.sender).at(id.height)->tx_at(id.index); }

    Validation validate(const TxId& target) const { return vtl::validate(tx_at(target), everything(target), *log, pki); }

    World world() const
    {
        World w;
        w.chains = chains;
        w.log = log.get();
        return w;
    }

    oracle_verdict oracle(const TxId& target) const
    {
        const auto w = world();
        return oracle_validate(target, w);
    }

    Pki pki;
    std::map<NodeId, KeyPair> keys;
    std::map<NodeId, IndividualChain> chains;
    std::unique_ptr<MainChain> log;
};

} // namespace vtl::testing
