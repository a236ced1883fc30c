#pragma once

#include <map>
#include <span>
#include <unordered_map>
#include <unordered_set>

#include <vtl/validation.hpp>

namespace vtl {

// Chain owner -> prefix height. Used both for what a proof needs and for what a node holds.
using ChainHeights = std::map<NodeId, height_t>;

void merge_max(ChainHeights& into, const ChainHeights& from);

struct incomplete_store_error : error {
    BlockKey missing;
    explicit incomplete_store_error(BlockKey k);
};

struct unconfirmed_error : error {
    TxId tx;
    explicit unconfirmed_error(TxId id);
};

// Blocks a node holds: contiguous prefixes per chain, plus validated-transaction and proof-summary caches.
// Foreign blocks enter through commit(), which only admits blocks that extend a prefix, link to it, and
// match their on-chain abstract; the owner's own chain enters through append_own() and is trusted.
class LocalStore {
public:
    explicit LocalStore(NodeId self) : self_(self) {}

    NodeId self() const { return self_; }

    void append_own(BlockPtr b);
    void replace_own_tip(BlockPtr b);

    // Commits the confirmed part of `blocks` (per owner: contiguous from the current top, linked, and no higher
    // than the last on-chain abstract among them). Returns the number of blocks added.
    std::size_t commit(std::span<const BlockPtr> blocks, const MainChain& log, const Pki& pki);

    const Block* block(NodeId owner, height_t h) const;
    BlockPtr block_ptr(NodeId owner, height_t h) const;
    height_t top(NodeId owner) const;
    height_t verified_through(NodeId owner) const { return top(owner); }
    std::size_t occurrences(NodeId owner, const Hash& digest, height_t upto) const;
    bool shares_source(NodeId owner, const std::vector<TxId>& sources, height_t upto, const TxId& exclude) const;

    bool known_valid(const TxId& id) const { return validated_.contains(id); }
    void mark_valid(const TxId& id) { validated_.insert(id); }
    template <typename Range>
    void mark_valid(const Range& ids) { validated_.insert(ids.begin(), ids.end()); }
    std::size_t validated_count() const { return validated_.size(); }

    ChainHeights holdings() const;
    std::size_t block_count() const;

    const Transaction* tx(const TxId& id) const;

    // Chain prefixes making up P(id) with the smallest confirming height per transaction.
    // Throws unconfirmed_error or incomplete_store_error.
    const ChainHeights& proof_summary(const TxId& id, const MainChain& log);

    // Blocks of `needed` beyond what `known` claims to hold, in (owner, height) order.
    std::vector<BlockPtr> delta(const ChainHeights& needed, const ChainHeights& known) const;

private:
    struct ChainData {
        std::vector<BlockPtr> blocks;
        // Heights holding each digest, and spending positions per source, both ascending.
        std::unordered_map<Hash, std::vector<height_t>> digests;
        std::unordered_map<TxId, std::vector<TxId>> spenders;
    };

    void index_block(ChainData& c, const Block& b);
    void push(BlockPtr b);

    NodeId self_;
    std::map<NodeId, ChainData> chains_;
    std::unordered_set<TxId> validated_;
    std::unordered_map<TxId, ChainHeights> summaries_;
};

// The store overlaid with received blocks that extend its prefixes. Store blocks take precedence.
class StoreView {
public:
    StoreView(const LocalStore& store, std::span<const BlockPtr> extra);

    const Block* block(NodeId owner, height_t h) const;
    height_t top(NodeId owner) const;
    height_t verified_through(NodeId owner) const { return store_->verified_through(owner); }
    std::size_t occurrences(NodeId owner, const Hash& digest, height_t upto) const;
    bool shares_source(NodeId owner, const std::vector<TxId>& sources, height_t upto, const TxId& exclude) const;
    bool known_valid(const TxId& id) const { return store_->known_valid(id); }

private:
    const LocalStore* store_;
    std::map<BlockKey, BlockPtr> extra_;
};

// P(target) with the smallest confirming height for every transaction involved.
ProofBundle build_proof(const TxId& target, LocalStore& store, const MainChain& log);

// Runs the validation function for the transaction at `target` against store + extra blocks. On success the
// validated transactions are cached and the confirmed extra blocks committed.
Validation validate_in_store(const TxId& target, const Transaction& tx, LocalStore& store, std::span<const BlockPtr> extra,
    const MainChain& log, const Pki& pki);

} // namespace vtl
