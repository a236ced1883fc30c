#pragma once

#include <map>

#include <vtl/ledger.hpp>

namespace vtl {

// A validity proof P(tx): blocks keyed by (owner, height) together with the transaction it proves.
struct ProofBundle {
    TxId target;
    std::map<BlockKey, BlockPtr> blocks;

    void add(BlockPtr b) { blocks[b->key()] = std::move(b); }
    const Block* block(NodeId owner, height_t h) const;
    // Highest height held for the owner, 0 when none.
    height_t top(NodeId owner) const;
    std::size_t block_count() const { return blocks.size(); }
    std::size_t encoded_bytes() const;
    // Distinct chain owners present.
    std::vector<NodeId> chains() const;
};

// Target TxId, u64 block count, then canonical blocks in ascending (owner, height) order.
bytes encode_bundle(const ProofBundle& p);
ProofBundle decode_bundle(std::span<const std::uint8_t> data);

// Read-only adapter that lets the validation algorithms run directly over a bundle.
class BundleView {
public:
    explicit BundleView(const ProofBundle& p) : p_(&p) {}

    const Block* block(NodeId owner, height_t h) const { return p_->block(owner, h); }
    height_t top(NodeId owner) const { return p_->top(owner); }
    height_t verified_through(NodeId) const { return 0; }
    std::size_t occurrences(NodeId owner, const Hash& digest, height_t upto) const;
    bool shares_source(NodeId owner, const std::vector<TxId>& sources, height_t upto, const TxId& exclude) const;
    bool known_valid(const TxId&) const { return false; }

private:
    const ProofBundle* p_;
};

bool sorted_ranges_intersect(const std::vector<TxId>& a, const std::vector<TxId>& b);

} // namespace vtl
