#include <vtl/store.hpp>

#include <algorithm>

namespace vtl {

void merge_max(ChainHeights& into, const ChainHeights& from)
{
    for (const auto& [owner, h] : from) {
        auto& slot = into[owner];
        slot = std::max(slot, h);
    }
}

incomplete_store_error::incomplete_store_error(BlockKey k)
    : error("incomplete store: missing block " + to_string(k))
    , missing(k)
{
}

unconfirmed_error::unconfirmed_error(TxId id)
    : error("no confirming abstract for " + to_string(id))
    , tx(id)
{
}

void LocalStore::index_block(ChainData& c, const Block& b)
{
    const auto& txs = b.txs();
    for (std::uint32_t i = 0; i < txs.size(); ++i) {
        c.digests[b.tx_digests()[i]].push_back(b.height());
        const TxId here { b.owner(), b.height(), i + 1 };
        for (const auto& src : txs[i].sources)
            c.spenders[src].push_back(here);
    }
}

void LocalStore::push(BlockPtr b)
{
    auto& c = chains_[b->owner()];
    if (b->height() != c.blocks.size() + 1)
        throw error("store: block " + to_string(b->key()) + " does not extend the held prefix");
    index_block(c, *b);
    c.blocks.push_back(std::move(b));
}

void LocalStore::append_own(BlockPtr b)
{
    if (b->owner() != self_)
        throw error("store: append_own with a foreign block");
    push(std::move(b));
}

void LocalStore::replace_own_tip(BlockPtr b)
{
    auto& c = chains_[self_];
    if (b->owner() != self_ || c.blocks.empty() || b->height() != c.blocks.size())
        throw error("store: replacement must have the tip's height");
    const Block& old = *c.blocks.back();
    const auto& txs = old.txs();
    // The tip holds the newest entry of every index list it touched.
    for (std::uint32_t i = 0; i < txs.size(); ++i) {
        auto d = c.digests.find(old.tx_digests()[i]);
        d->second.pop_back();
        if (d->second.empty())
            c.digests.erase(d);
        for (const auto& src : txs[i].sources) {
            auto s = c.spenders.find(src);
            s->second.pop_back();
            if (s->second.empty())
                c.spenders.erase(s);
        }
    }
    c.blocks.pop_back();
    index_block(c, *b);
    c.blocks.push_back(std::move(b));
    // Summaries and verdicts involving the replaced tip are unconfirmed and were never cached.
}

std::size_t LocalStore::commit(std::span<const BlockPtr> blocks, const MainChain& log, const Pki& pki)
{
    std::map<BlockKey, const BlockPtr*> sorted;
    for (const auto& b : blocks)
        sorted.emplace(b->key(), &b);

    std::size_t added = 0;
    auto it = sorted.begin();
    while (it != sorted.end()) {
        const NodeId owner = it->first.owner;
        const height_t held = top(owner);
        std::vector<BlockPtr> run;
        const Block* prev = held > 0 ? block(owner, held) : nullptr;
        height_t confirmed = held;
        bool broken = false;
        for (; it != sorted.end() && it->first.owner == owner; ++it) {
            if (broken || it->first.height <= held)
                continue;
            const BlockPtr& b = *it->second;
            const height_t want = held + run.size() + 1;
            const bool linked = want == 1 ? !b->prev_hash().has_value() : (prev != nullptr && b->prev_hash() == prev->hash());
            if (b->height() != want || !linked) {
                broken = true;
                continue;
            }
            if (const auto* a = log.find(owner, want); a != nullptr) {
                if (a->block_hash != b->hash() || !verify_abstract(*a, pki)) {
                    broken = true;
                    continue;
                }
                confirmed = want;
            }
            run.push_back(b);
            prev = b.get();
        }
        if (owner == self_)
            continue;
        for (height_t h = held + 1; h <= confirmed; ++h) {
            push(run[h - held - 1]);
            ++added;
        }
    }
    return added;
}

const Block* LocalStore::block(NodeId owner, height_t h) const
{
    const auto it = chains_.find(owner);
    if (it == chains_.end() || h == 0 || h > it->second.blocks.size())
        return nullptr;
    return it->second.blocks[h - 1].get();
}

BlockPtr LocalStore::block_ptr(NodeId owner, height_t h) const
{
    const auto it = chains_.find(owner);
    if (it == chains_.end() || h == 0 || h > it->second.blocks.size())
        return nullptr;
    return it->second.blocks[h - 1];
}

height_t LocalStore::top(NodeId owner) const
{
    const auto it = chains_.find(owner);
    return it == chains_.end() ? 0 : it->second.blocks.size();
}

std::size_t LocalStore::occurrences(NodeId owner, const Hash& digest, height_t upto) const
{
    const auto c = chains_.find(owner);
    if (c == chains_.end())
        return 0;
    const auto d = c->second.digests.find(digest);
    if (d == c->second.digests.end())
        return 0;
    return std::upper_bound(d->second.begin(), d->second.end(), upto) - d->second.begin();
}

bool LocalStore::shares_source(NodeId owner, const std::vector<TxId>& sources, height_t upto, const TxId& exclude) const
{
    const auto c = chains_.find(owner);
    if (c == chains_.end())
        return false;
    for (const auto& src : sources) {
        const auto s = c->second.spenders.find(src);
        if (s == c->second.spenders.end())
            continue;
        for (const auto& at : s->second) {
            if (at.height > upto)
                break;
            if (at != exclude)
                return true;
        }
    }
    return false;
}

ChainHeights LocalStore::holdings() const
{
    ChainHeights out;
    for (const auto& [owner, c] : chains_) {
        if (!c.blocks.empty())
            out[owner] = c.blocks.size();
    }
    return out;
}

std::size_t LocalStore::block_count() const
{
    std::size_t n = 0;
    for (const auto& [owner, c] : chains_)
        n += c.blocks.size();
    return n;
}

const Transaction* LocalStore::tx(const TxId& id) const
{
    const auto* b = block(id.sender, id.height);
    return b == nullptr ? nullptr : b->tx_at(id.index);
}

const ChainHeights& LocalStore::proof_summary(const TxId& id, const MainChain& log)
{
    if (auto it = summaries_.find(id); it != summaries_.end())
        return it->second;

    auto locate = [this](const TxId& t) -> const Transaction& {
        const auto* found = tx(t);
        if (found == nullptr)
            throw incomplete_store_error(BlockKey { t.sender, t.height });
        return *found;
    };
    const auto order = post_order(
        id,
        [&](const TxId& t, std::vector<TxId>& out) {
            const auto& sources = locate(t).sources;
            out.insert(out.end(), sources.begin(), sources.end());
        },
        [this](const TxId& t) { return summaries_.contains(t); });

    for (const auto& t : order) {
        const auto k = log.lowest_at_or_above(t.sender, t.height);
        if (!k)
            throw unconfirmed_error(t);
        ChainHeights s;
        s[t.sender] = *k;
        for (const auto& src : locate(t).sources) {
            // A cyclic reference has no finite proof.
            const auto it = summaries_.find(src);
            if (it == summaries_.end())
                throw unconfirmed_error(src);
            merge_max(s, it->second);
        }
        summaries_.emplace(t, std::move(s));
    }
    return summaries_.at(id);
}

std::vector<BlockPtr> LocalStore::delta(const ChainHeights& needed, const ChainHeights& known) const
{
    std::vector<BlockPtr> out;
    for (const auto& [owner, h] : needed) {
        const auto k = known.find(owner);
        if (k != known.end() && k->second >= h)
            continue;
        const height_t from = k == known.end() ? 1 : k->second + 1;
        for (height_t m = from; m <= h; ++m) {
            auto b = block_ptr(owner, m);
            if (!b)
                throw incomplete_store_error(BlockKey { owner, m });
            out.push_back(std::move(b));
        }
    }
    return out;
}

StoreView::StoreView(const LocalStore& store, std::span<const BlockPtr> extra)
    : store_(&store)
{
    for (const auto& b : extra) {
        if (store.block(b->owner(), b->height()) == nullptr)
            extra_.emplace(b->key(), b);
    }
}

const Block* StoreView::block(NodeId owner, height_t h) const
{
    if (const auto* b = store_->block(owner, h))
        return b;
    const auto it = extra_.find(BlockKey { owner, h });
    return it == extra_.end() ? nullptr : it->second.get();
}

height_t StoreView::top(NodeId owner) const
{
    height_t t = store_->top(owner);
    // Extra blocks count only where they continue the held prefix.
    while (extra_.contains(BlockKey { owner, t + 1 }))
        ++t;
    return t;
}

std::size_t StoreView::occurrences(NodeId owner, const Hash& digest, height_t upto) const
{
    std::size_t n = store_->occurrences(owner, digest, upto);
    const height_t held = store_->top(owner);
    for (auto it = extra_.lower_bound(BlockKey { owner, held + 1 }); it != extra_.end() && it->first.owner == owner && it->first.height <= upto; ++it) {
        for (const auto& d : it->second->tx_digests())
            n += d == digest ? 1 : 0;
    }
    return n;
}

bool StoreView::shares_source(NodeId owner, const std::vector<TxId>& sources, height_t upto, const TxId& exclude) const
{
    if (store_->shares_source(owner, sources, upto, exclude))
        return true;
    const height_t held = store_->top(owner);
    for (auto it = extra_.lower_bound(BlockKey { owner, held + 1 }); it != extra_.end() && it->first.owner == owner && it->first.height <= upto; ++it) {
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

ProofBundle build_proof(const TxId& target, LocalStore& store, const MainChain& log)
{
    ProofBundle p;
    p.target = target;
    for (const auto& b : store.delta(store.proof_summary(target, log), {}))
        p.add(b);
    return p;
}

Validation validate_in_store(const TxId& target, const Transaction& tx, LocalStore& store, std::span<const BlockPtr> extra,
    const MainChain& log, const Pki& pki)
{
    Validation res;
    {
        const StoreView view { store, extra };
        Validator v { view, log, pki };
        res = v.validate(target, tx);
        if (res.valid())
            store.mark_valid(v.validated());
    }
    // Confirmed, linked blocks are the true chain regardless of this verdict.
    store.commit(extra, log, pki);
    return res;
}

} // namespace vtl
