#include <set>

#include <gtest/gtest.h>

#include <vtl/bundle.hpp>
#include <vtl/rng.hpp>

#include "support.hpp"

using namespace vtl;
using vtl::testing::at;
using vtl::testing::tx;

namespace {

Block fixture_block()
{
    IndividualChain c { NodeId { 1 }, 100 };
    c.append_block({ tx({ at(1, 1, 1) }, 1, 2, 30, 70) });
    return *c.at(2);
}

Transaction random_tx(Rng& rng)
{
    std::vector<TxId> srcs;
    const auto k = rng.uniform(0, 3);
    for (std::uint64_t i = 0; i < k; ++i)
        srcs.push_back(at(static_cast<std::uint32_t>(rng.uniform(1, 5)), rng.uniform(1, 6), static_cast<std::uint32_t>(rng.uniform(1, 3))));
    return Transaction(std::move(srcs), NodeId { static_cast<std::uint32_t>(rng.uniform(1, 5)) }, NodeId { static_cast<std::uint32_t>(rng.uniform(1, 5)) },
        rng.uniform(0, 40), rng.uniform(0, 40));
}

} // namespace

TEST(Encoding, SameTransactionSameBytes)
{
    const auto t = tx({ at(1, 1, 1), at(2, 3, 1) }, 1, 2, 5, 7);
    EXPECT_EQ(canonical_encode(t), canonical_encode(t));
}

TEST(Encoding, RemainderChangesBytes)
{
    EXPECT_NE(canonical_encode(tx({ at(1, 1, 1) }, 1, 2, 5, 7)), canonical_encode(tx({ at(1, 1, 1) }, 1, 2, 5, 8)));
}

TEST(Encoding, SourcesAreSortedBeforeEncoding)
{
    EXPECT_EQ(canonical_encode(tx({ at(2, 3, 1), at(1, 1, 1) }, 1, 2, 5, 7)), canonical_encode(tx({ at(1, 1, 1), at(2, 3, 1) }, 1, 2, 5, 7)));
}

TEST(Encoding, GoldenDigest)
{
    EXPECT_EQ(hash_name(), "sha256");
    EXPECT_EQ(block_hash(fixture_block()).hex(), "0f055beeabb245266c5bcc2830a692c4a72cbc82d9b59b7c718a6d7ce68ba488");
}

TEST(Encoding, InjectiveOnRandomCorpus)
{
    Rng rng(7);
    std::set<Transaction, decltype([](const Transaction& a, const Transaction& b) {
        return std::tie(a.sources, a.sender, a.receiver, a.amount, a.remainder) < std::tie(b.sources, b.sender, b.receiver, b.amount, b.remainder);
    })> values;
    std::set<bytes> encodings;
    while (values.size() < 12000) {
        const auto t = random_tx(rng);
        const bool fresh_value = values.insert(t).second;
        const bool fresh_bytes = encodings.insert(canonical_encode(t)).second;
        ASSERT_EQ(fresh_value, fresh_bytes);
    }
    EXPECT_EQ(encodings.size(), values.size());
}

TEST(Encoding, BlocksDifferingInPrevHashPresenceDiffer)
{
    const Block a { NodeId { 1 }, 2, std::nullopt, { tx({ at(1, 1, 1) }, 1, 2, 1, 0) } };
    const Block b { NodeId { 1 }, 2, Hash {}, { tx({ at(1, 1, 1) }, 1, 2, 1, 0) } };
    EXPECT_NE(canonical_encode(a), canonical_encode(b));
}

TEST(Encoding, BlockRoundTrip)
{
    const auto b = fixture_block();
    const auto raw = canonical_encode(b);
    Decoder dec { raw };
    const auto back = decode_block(dec);
    EXPECT_TRUE(dec.done());
    EXPECT_EQ(back.hash(), b.hash());
    EXPECT_EQ(back.txs(), b.txs());
}

TEST(Encoding, TruncatedInputThrows)
{
    auto raw = canonical_encode(fixture_block());
    raw.pop_back();
    Decoder dec { raw };
    EXPECT_THROW(decode_block(dec), error);
}

TEST(Encoding, BundleRoundTrip)
{
    vtl::testing::Ledger l(2);
    l.commit(1, { tx({ at(1, 1, 1) }, 1, 2, 30, 70) });
    const auto p = l.everything(at(1, 2, 1));
    const auto back = decode_bundle(encode_bundle(p));
    EXPECT_EQ(back.target, p.target);
    ASSERT_EQ(back.block_count(), p.block_count());
    for (const auto& [k, b] : p.blocks)
        EXPECT_EQ(back.blocks.at(k)->hash(), b->hash());
}

TEST(Hashing, IdenticalBlocksIdenticalHashes)
{
    EXPECT_EQ(block_hash(fixture_block()), block_hash(fixture_block()));
}

TEST(Hashing, AmountChangeChangesHash)
{
    IndividualChain c { NodeId { 1 }, 100 };
    const Block b1 = c.next_block({ tx({ at(1, 1, 1) }, 1, 2, 30, 70) });
    const Block b2 = c.next_block({ tx({ at(1, 1, 1) }, 1, 2, 31, 70) });
    EXPECT_NE(b1.hash(), b2.hash());
}

TEST(Genesis, Shape)
{
    const auto g = genesis_block(NodeId { 3 }, 100);
    EXPECT_EQ(g.owner(), NodeId { 3 });
    EXPECT_EQ(g.height(), 1u);
    EXPECT_FALSE(g.prev_hash().has_value());
    ASSERT_EQ(g.txs().size(), 1u);
    EXPECT_EQ(g.txs()[0], tx({}, 3, 3, 0, 100));
    EXPECT_TRUE(g.txs()[0].is_genesis_shaped());
    EXPECT_EQ(owned_share(g.txs()[0], NodeId { 3 }), 100u);
}

TEST(Chain, AppendLinksToPredecessor)
{
    IndividualChain c { NodeId { 1 }, 100 };
    const auto& b = c.append_block({ tx({ at(1, 1, 1) }, 1, 2, 30, 70) });
    EXPECT_EQ(b.height(), 2u);
    EXPECT_EQ(b.prev_hash(), c.at(1)->hash());
    c.append_block({ tx({ at(1, 2, 1) }, 1, 3, 10, 60) });
    EXPECT_TRUE(c.verify_linkage());
}

TEST(Chain, ForeignSenderRejected)
{
    IndividualChain c { NodeId { 1 }, 100 };
    EXPECT_THROW(c.append_block({ tx({ at(2, 1, 1) }, 2, 1, 5, 95) }), error);
    EXPECT_THROW(c.append_block({}), error);
}

TEST(Chain, PushChecksLinkage)
{
    IndividualChain c { NodeId { 1 }, 100 };
    auto stray = std::make_shared<const Block>(NodeId { 1 }, 2, Hash {}, std::vector<Transaction> { tx({ at(1, 1, 1) }, 1, 2, 1, 99) });
    EXPECT_THROW(c.push(stray), error);
}

TEST(Ownership, SharesSplitBetweenReceiverAndSender)
{
    const auto t = tx({ at(1, 1, 1) }, 1, 2, 30, 70);
    EXPECT_EQ(owned_share(t, NodeId { 2 }), 30u);
    EXPECT_EQ(owned_share(t, NodeId { 1 }), 70u);
    EXPECT_EQ(owned_share(t, NodeId { 3 }), 0u);
}
