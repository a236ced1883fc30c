#include <vtl/bundle.hpp>

#include <algorithm>

namespace vtl {

const Block* ProofBundle::block(NodeId owner, height_t h) const
{
    const auto it = blocks.find(BlockKey { owner, h });
    return it == blocks.end() ? nullptr : it->second.get();
}

height_t ProofBundle::top(NodeId owner) const
{
    auto it = blocks.lower_bound(BlockKey { NodeId { owner.value + 1 }, 0 });
    if (it == blocks.begin())
        return 0;
    --it;
    return it->first.owner == owner ? it->first.height : 0;
}

std::size_t ProofBundle::encoded_bytes() const
{
    std::size_t n = 0;
    for (const auto& [k, b] : blocks)
        n += b->encoded_size();
    return n;
}

std::vector<NodeId> ProofBundle::chains() const
{
    std::vector<NodeId> out;
    for (const auto& [k, b] : blocks) {
        if (out.empty() || out.back() != k.owner)
            out.push_back(k.owner);
    }
    return out;
}

bytes encode_bundle(const ProofBundle& p)
{
    Encoder enc;
    enc.tx_id(p.target).u64(p.blocks.size());
    for (const auto& [k, b] : p.blocks)
        enc.raw(canonical_encode(*b));
    return std::move(enc).take();
}

ProofBundle decode_bundle(std::span<const std::uint8_t> data)
{
    Decoder dec { data };
    ProofBundle p;
    p.target = dec.tx_id();
    const auto n = dec.u64();
    std::optional<BlockKey> prev;
    for (std::uint64_t i = 0; i < n; ++i) {
        auto b = std::make_shared<const Block>(decode_block(dec));
        if (prev && !(*prev < b->key()))
            throw error("bundle blocks must be unique and sorted by (owner, height)");
        prev = b->key();
        p.add(std::move(b));
    }
    if (!dec.done())
        throw error("trailing bytes after bundle");
    return p;
}

bool sorted_ranges_intersect(const std::vector<TxId>& a, const std::vector<TxId>& b)
{
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j)
            ++i;
        else if (*j < *i)
            ++j;
        else
            return true;
    }
    return false;
}

std::size_t BundleView::occurrences(NodeId owner, const Hash& digest, height_t upto) const
{
    std::size_t n = 0;
    for (auto it = p_->blocks.lower_bound(BlockKey { owner, 1 }); it != p_->blocks.end() && it->first.owner == owner && it->first.height <= upto; ++it) {
        for (const auto& d : it->second->tx_digests())
            n += d == digest ? 1 : 0;
    }
    return n;
}

bool BundleView::shares_source(NodeId owner, const std::vector<TxId>& sources, height_t upto, const TxId& exclude) const
{
    for (auto it = p_->blocks.lower_bound(BlockKey { owner, 1 }); it != p_->blocks.end() && it->first.owner == owner && it->first.height <= upto; ++it) {
        const auto& txs = it->second->txs();
        for (std::uint32_t i = 0; i < txs.size(); ++i) {
            if (TxId { owner, it->first.height, i + 1 } == exclude)
                continue;
            if (sorted_ranges_intersect(txs[i].sources, sources))
                return true;
        }
    }
    return false;
}

} // namespace vtl
