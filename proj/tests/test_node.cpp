#include <gtest/gtest.h>

#include <vtl/node.hpp>

#include "support.hpp"

using namespace vtl;
using vtl::testing::at;

namespace {

// Nodes wired by hand: every message is delivered explicitly by the test.
struct Net {
    explicit Net(std::vector<amount_t> values, std::vector<BehaviorProfile> profiles = {}, std::uint32_t retry_cap = 3)
    {
        profiles.resize(values.size());
        for (std::uint32_t i = 1; i <= values.size(); ++i) {
            const NodeId id { i };
            auto key = KeyPair::derive(id, 5, sig_scheme::test_keyed);
            pki.add(id, key.public_key());
            nodes.push_back(std::make_unique<Node>(id, values[i - 1], profiles[i - 1], std::move(key), retry_cap));
        }
        log = std::make_unique<MainChain>(pki);
        for (const auto& n : nodes)
            log->submit(n->genesis_abstract());
        log->seal();
    }

    Node& operator[](std::uint32_t u) { return *nodes.at(u - 1); }

    // Submits and seals `u`'s pending block, then returns the announcements it produces.
    std::vector<TransactionAnnounce> confirm(std::uint32_t u)
    {
        for (auto& a : (*this)[u].maybe_submit_abstract(*log, rng))
            log->submit(std::move(a));
        log->seal();
        std::vector<TransactionAnnounce> out;
        for (const auto& c : (*this)[u].poll_confirmation(*log))
            out.push_back((*this)[u].announce(c, *log));
        return out;
    }

    ReceiveOutcome deliver(const TransactionAnnounce& m) { return (*this)[m.tx.receiver.value].receive_transaction(m, *log, pki); }

    // Creates, confirms and delivers one payment.
    ReceiveOutcome pay(std::uint32_t from, std::uint32_t to, amount_t amount)
    {
        const auto t = (*this)[from].create_transaction(NodeId { to }, amount, *log, rng);
        EXPECT_TRUE(t.has_value());
        ReceiveOutcome last;
        for (const auto& m : confirm(from))
            if (m.tx.receiver == NodeId { to })
                last = deliver(m);
        return last;
    }

    // One round of proof retries for node u.
    std::vector<ReceiveOutcome> retry(std::uint32_t u, std::vector<TxId>& abandoned)
    {
        std::vector<ReceiveOutcome> out;
        for (const auto& [peer, req] : (*this)[u].proof_requests(abandoned))
            out.push_back((*this)[u].on_proof_response((*this)[peer.value].handle_proof_request(req, *log), *log, pki));
        return out;
    }

    Pki pki;
    std::unique_ptr<MainChain> log;
    std::vector<std::unique_ptr<Node>> nodes;
    Rng rng { 3 };
};

} // namespace

TEST(Node, StartsWithGenesisValue)
{
    Net net({ 100, 50 });
    EXPECT_EQ(net[1].wallet().total(), 100u);
    EXPECT_EQ(net[2].wallet().unspent.at(at(2, 1, 1)), 50u);
    EXPECT_EQ(net.log->rounds(), 1u);
}

TEST(Node, PaymentIsAcceptedAndCredited)
{
    Net net({ 100, 100 });
    const auto out = net.pay(1, 2, 30);
    EXPECT_EQ(out.status, receive_status::accepted);
    EXPECT_EQ(net[2].wallet().total(), 130u);
    EXPECT_EQ(net[1].wallet().total(), 70u);
    EXPECT_EQ(net[1].wallet().unspent.at(at(1, 2, 1)), 70u);
}

TEST(Node, InsufficientFundsCreatesNothing)
{
    Net net({ 10, 10 });
    EXPECT_FALSE(net[1].create_transaction(NodeId { 2 }, 11, *net.log, net.rng));
    EXPECT_TRUE(net[1].pending().empty());
    EXPECT_THROW(net[1].smart_transact(NodeId { 2 }, 11, *net.log), insufficient_funds_error);
}

TEST(Node, OnlyOneAbstractInFlight)
{
    Net net({ 100, 100 });
    net.pay(2, 1, 40);
    net[1].create_transaction(NodeId { 2 }, 5, *net.log, net.rng);
    EXPECT_EQ(net[1].maybe_submit_abstract(*net.log, net.rng).size(), 1u);
    ASSERT_TRUE(net[1].create_transaction(NodeId { 2 }, 5, *net.log, net.rng));
    EXPECT_TRUE(net[1].maybe_submit_abstract(*net.log, net.rng).empty());
    EXPECT_EQ(net[1].in_flight(), 2u);
    EXPECT_EQ(net[1].pending().size(), 1u);
    EXPECT_EQ(net[1].locked(), 140u);
}

TEST(Node, ChangeUnusableUntilConfirmed)
{
    Net net({ 100, 100 });
    ASSERT_TRUE(net[1].create_transaction(NodeId { 2 }, 5, *net.log, net.rng));
    EXPECT_FALSE(net[1].create_transaction(NodeId { 2 }, 5, *net.log, net.rng));
    net.confirm(1);
    EXPECT_TRUE(net[1].create_transaction(NodeId { 2 }, 5, *net.log, net.rng));
}

TEST(Node, NothingPendingNothingSubmitted)
{
    Net net({ 100 });
    EXPECT_TRUE(net[1].maybe_submit_abstract(*net.log, net.rng).empty());
    EXPECT_TRUE(net[1].poll_confirmation(*net.log).empty());
}

TEST(Node, PendingTransactionsShareOneBlock)
{
    Net net({ 100, 100, 100 });
    net.pay(2, 1, 40);
    net[1].create_transaction(NodeId { 2 }, 5, *net.log, net.rng);
    net[1].create_transaction(NodeId { 3 }, 5, *net.log, net.rng);
    const auto out = net.confirm(1);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].id, at(1, 2, 1));
    EXPECT_EQ(out[1].id, at(1, 2, 2));
    EXPECT_EQ(out[0].tx.sources, std::vector { at(1, 1, 1) });
    EXPECT_EQ(out[1].tx.sources, std::vector { at(2, 2, 1) });
    EXPECT_EQ(net.deliver(out[0]).status, receive_status::accepted);
    EXPECT_EQ(net.deliver(out[1]).status, receive_status::accepted);
    EXPECT_EQ(net[1].wallet().total(), 130u);
}

TEST(SmartTransact, PrefersChainsTheReceiverHolds)
{
    // Node 1 holds a small genesis plus values from nodes 2 and 3. Node 4 already knows node 3's chain.
    Net net({ 5, 100, 100, 100 });
    EXPECT_EQ(net.pay(2, 1, 40).status, receive_status::accepted);
    EXPECT_EQ(net.pay(3, 1, 40).status, receive_status::accepted);
    net[1].on_knowledge(KnowledgeAnnounce { NodeId { 4 }, { { NodeId { 3 }, 5 } } });
    EXPECT_EQ(net[1].smart_transact(NodeId { 4 }, 30, *net.log), std::vector { at(3, 2, 1) });
    net[1].on_knowledge(KnowledgeAnnounce { NodeId { 4 }, { { NodeId { 2 }, 5 } } });
    // Both are free now and the tie goes to the smaller TxId.
    EXPECT_EQ(net[1].smart_transact(NodeId { 4 }, 30, *net.log), std::vector { at(2, 2, 1) });
    // Genesis is always free: the sender's own chain is in every proof anyway.
    EXPECT_EQ(net[1].smart_transact(NodeId { 4 }, 5, *net.log), std::vector { at(1, 1, 1) });
}

TEST(SmartTransact, ReceiverOwnChainIsFree)
{
    Net net({ 5, 100, 100 });
    EXPECT_EQ(net.pay(2, 1, 40).status, receive_status::accepted);
    EXPECT_EQ(net.pay(3, 1, 40).status, receive_status::accepted);
    // Genesis (5) is too small, and node 2's chain costs nothing when paying node 2.
    EXPECT_EQ(net[1].smart_transact(NodeId { 2 }, 30, *net.log), std::vector { at(2, 2, 1) });
    EXPECT_EQ(net[1].smart_transact(NodeId { 3 }, 30, *net.log), std::vector { at(3, 2, 1) });
}

TEST(SmartTransact, SingleValue)
{
    Net net({ 100, 100 });
    EXPECT_EQ(net[1].smart_transact(NodeId { 2 }, 100, *net.log), std::vector { at(1, 1, 1) });
}

TEST(SmartTransact, FrugalUsesFewerSources)
{
    // Node 1: genesis 5 plus a 40 from node 2, all free for receiver 2.
    for (auto policy : { source_policy::frugal, source_policy::naive }) {
        Net net({ 5, 100 });
        net[1].set_policy(policy);
        EXPECT_EQ(net.pay(2, 1, 40).status, receive_status::accepted);
        EXPECT_EQ(net[1].smart_transact(NodeId { 2 }, 3, *net.log), std::vector { at(1, 1, 1) });
        const auto big = net[1].smart_transact(NodeId { 2 }, 30, *net.log);
        if (policy == source_policy::frugal)
            EXPECT_EQ(big, std::vector { at(2, 2, 1) });
        else
            EXPECT_EQ(big, (std::vector { at(1, 1, 1), at(2, 2, 1) }));
    }
}

TEST(SmartTransact, PolicyNamesParse)
{
    EXPECT_EQ(parse_source_policy("naive"), source_policy::naive);
    EXPECT_EQ(to_string(source_policy::frugal), "frugal");
    EXPECT_FALSE(parse_source_policy("greedy"));
}

TEST(Receive, SecondDeliveryIgnored)
{
    Net net({ 100, 100 });
    net[1].create_transaction(NodeId { 2 }, 5, *net.log, net.rng);
    const auto m = net.confirm(1).at(0);
    EXPECT_EQ(net.deliver(m).status, receive_status::accepted);
    EXPECT_EQ(net.deliver(m).status, receive_status::ignored);
}

TEST(Receive, DeltaShrinksAfterFirstPayment)
{
    Net net({ 100, 100 });
    net[1].create_transaction(NodeId { 2 }, 5, *net.log, net.rng);
    const auto first = net.confirm(1).at(0);
    EXPECT_EQ(first.delta.size(), 2u);
    net.deliver(first);
    net[1].create_transaction(NodeId { 2 }, 5, *net.log, net.rng);
    const auto second = net.confirm(1).at(0);
    ASSERT_EQ(second.delta.size(), 1u);
    EXPECT_EQ(second.delta[0]->key(), (BlockKey { NodeId { 1 }, 3 }));
    EXPECT_EQ(net.deliver(second).status, receive_status::accepted);
}

TEST(Receive, InflatedRemainderRejected)
{
    Net net({ 100, 100 }, { BehaviorProfile { behavior::inflator } });
    std::size_t inflated = 0;
    for (int i = 0; i < 8; ++i) {
        net[1].create_transaction(NodeId { 2 }, 1, *net.log, net.rng);
        for (const auto& m : net.confirm(1)) {
            amount_t in = 0;
            for (const auto& s : m.tx.sources)
                in += owned_share(*net[1].store().tx(s), NodeId { 1 });
            const auto out = net.deliver(m);
            if (in != m.tx.amount + m.tx.remainder) {
                ++inflated;
                EXPECT_EQ(out.validation.why, reason::equality);
            }
        }
    }
    EXPECT_GT(inflated, 0u);
}

TEST(Receive, DoubleSpendRejected)
{
    Net net({ 100, 100, 100 }, { BehaviorProfile { behavior::double_spender } });
    std::size_t flagged = 0;
    for (std::uint32_t i = 0; i < 12; ++i) {
        if (!net[1].create_transaction(NodeId { 2 + i % 2 }, 2, *net.log, net.rng))
            continue;
        for (const auto& m : net.confirm(1)) {
            const auto out = net.deliver(m);
            if (out.status != receive_status::accepted) {
                EXPECT_TRUE(out.validation.why == reason::double_spend || out.validation.why == reason::source_invalid)
                    << to_string(out.validation.why);
                flagged += out.validation.why == reason::double_spend;
            }
        }
    }
    EXPECT_GT(flagged, 0u);
}

TEST(Receive, WithheldProofAbandonedAfterCap)
{
    Net net({ 100, 100 }, { BehaviorProfile { behavior::proof_withholder } }, 2);
    const auto out = net.pay(1, 2, 10);
    EXPECT_EQ(out.status, receive_status::retry);
    std::vector<TxId> abandoned;
    for (int round = 0; round < 2; ++round) {
        for (const auto& r : net.retry(2, abandoned))
            EXPECT_EQ(r.status, receive_status::retry);
        EXPECT_TRUE(abandoned.empty());
    }
    EXPECT_TRUE(net.retry(2, abandoned).empty());
    EXPECT_EQ(abandoned, std::vector { at(1, 2, 1) });
    EXPECT_EQ(net[2].wallet().total(), 100u);
}

TEST(Receive, ProofRequestRecoversFromMissingDelta)
{
    Net net({ 100, 100 });
    net[1].create_transaction(NodeId { 2 }, 10, *net.log, net.rng);
    auto m = net.confirm(1).at(0);
    m.delta.clear();
    EXPECT_EQ(net.deliver(m).status, receive_status::retry);
    std::vector<TxId> abandoned;
    const auto outs = net.retry(2, abandoned);
    ASSERT_EQ(outs.size(), 1u);
    EXPECT_EQ(outs[0].status, receive_status::accepted);
    EXPECT_EQ(net[2].wallet().total(), 110u);
}

TEST(Receive, LiarGetsEmptyDeltasButStaysSafe)
{
    Net net({ 100, 100 }, { {}, BehaviorProfile { behavior::honest, true } });
    net[1].on_knowledge(net[2].announce_knowledge(2));
    net[1].create_transaction(NodeId { 2 }, 10, *net.log, net.rng);
    const auto m = net.confirm(1).at(0);
    EXPECT_TRUE(m.delta.empty());
    EXPECT_EQ(net.deliver(m).status, receive_status::retry);
    EXPECT_EQ(net[2].wallet().total(), 100u);
    std::vector<TxId> abandoned;
    const auto outs = net.retry(2, abandoned);
    ASSERT_EQ(outs.size(), 1u);
    EXPECT_EQ(outs[0].status, receive_status::accepted);
}

TEST(Knowledge, AnnounceReportsHoldings)
{
    Net net({ 100, 100, 100 });
    net.pay(1, 2, 10);
    const auto k = net[2].announce_knowledge(3);
    EXPECT_EQ(k.from, NodeId { 2 });
    EXPECT_EQ(k.coords, (ChainHeights { { NodeId { 1 }, 2 }, { NodeId { 2 }, 1 } }));
    net[3].on_knowledge(k);
    EXPECT_EQ(net[3].collected(NodeId { 2 }), k.coords);
    // Knowledge never shrinks.
    net[3].on_knowledge(KnowledgeAnnounce { NodeId { 2 }, { { NodeId { 1 }, 1 } } });
    EXPECT_EQ(net[3].collected(NodeId { 2 }).at(NodeId { 1 }), 2u);
}

TEST(Knowledge, ProofRequestAnsweredWithDelta)
{
    Net net({ 100, 100 });
    net.pay(1, 2, 10);
    const auto r = net[1].handle_proof_request(ProofRequest { at(1, 2, 1), NodeId { 2 }, { { NodeId { 1 }, 1 } } }, *net.log);
    ASSERT_EQ(r.delta.size(), 1u);
    EXPECT_EQ(r.delta[0]->key(), (BlockKey { NodeId { 1 }, 2 }));
    // Requests for someone else's transaction get nothing.
    EXPECT_TRUE(net[2].handle_proof_request(ProofRequest { at(1, 2, 1), NodeId { 1 }, {} }, *net.log).delta.empty());
}

TEST(Equivocator, OneVersionWinsAndChainFollowsIt)
{
    Net net({ 100, 100, 100 }, { BehaviorProfile { behavior::equivocator } });
    net.pay(2, 1, 40);
    net[1].create_transaction(NodeId { 2 }, 5, *net.log, net.rng);
    net[1].create_transaction(NodeId { 3 }, 5, *net.log, net.rng);
    const auto abstracts = net[1].maybe_submit_abstract(*net.log, net.rng);
    ASSERT_EQ(abstracts.size(), 2u);
    EXPECT_NE(abstracts[0].block_hash, abstracts[1].block_hash);
    for (const auto& a : abstracts)
        net.log->submit(a);
    net.log->seal();
    EXPECT_EQ(net.log->equivocations().size(), 1u);
    for (const auto& c : net[1].poll_confirmation(*net.log))
        net.deliver(net[1].announce(c, *net.log));
    EXPECT_EQ(net[1].chain().at(2)->hash(), net.log->find(NodeId { 1 }, 2)->block_hash);
    EXPECT_EQ(net[2].wallet().total() + net[3].wallet().total(), 170u);
}

TEST(Acquired, CountsChainsBehindHoldings)
{
    Net net({ 100, 100, 100 });
    net.pay(2, 1, 10);
    EXPECT_EQ(net[1].acquired_chains(*net.log), (std::set { NodeId { 1 }, NodeId { 2 } }));
    net.pay(3, 1, 10);
    EXPECT_EQ(net[1].acquired_chains(*net.log).size(), 3u);
}

TEST(Wire, SizesGrowWithContent)
{
    Net net({ 100, 100 });
    net[1].create_transaction(NodeId { 2 }, 5, *net.log, net.rng);
    const auto m = net.confirm(1).at(0);
    auto bare = m;
    bare.delta.clear();
    EXPECT_GT(wire_size(m), wire_size(bare));
    EXPECT_EQ(wire_size(KnowledgeAnnounce { NodeId { 1 }, { { NodeId { 1 }, 1 } } }), 28u);
}
