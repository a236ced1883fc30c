#include <vtl/oracle.hpp>

#include <vtl/post_order.hpp>

namespace vtl {

const Transaction* Oracle::find(const TxId& id) const
{
    const auto c = world_->chains.find(id.sender);
    if (c == world_->chains.end())
        return nullptr;
    const auto* b = c->second.at(id.height);
    return b == nullptr ? nullptr : b->tx_at(id.index);
}

bool Oracle::confirmed(NodeId owner, height_t h)
{
    const BlockKey key { owner, h };
    if (auto it = confirmed_.find(key); it != confirmed_.end())
        return it->second;
    const auto& chain = world_->chains.at(owner);
    const bool ok = is_confirmed(*chain.at(h), chain, *world_->log);
    confirmed_.emplace(key, ok);
    return ok;
}

oracle_verdict Oracle::validate(const TxId& target)
{
    // Warm up deep dependency graphs bottom-up so the recursion stays shallow.
    const auto order = post_order(
        target,
        [this](const TxId& id, std::vector<TxId>& out) {
            const auto* tx = find(id);
            if (tx == nullptr)
                return;
            out.insert(out.end(), tx->sources.begin(), tx->sources.end());
        },
        [this](const TxId& id) { return memo_.contains(id); });
    for (const auto& id : order) {
        bool tainted = false;
        valid_rec(id, tainted);
    }
    bool tainted = false;
    return valid_rec(target, tainted) ? oracle_verdict::valid : oracle_verdict::invalid;
}

bool Oracle::valid_rec(const TxId& id, bool& tainted)
{
    if (auto it = memo_.find(id); it != memo_.end())
        return it->second;
    if (active_.contains(id)) {
        tainted = true;
        return false;
    }
    active_.insert(id);
    bool local_taint = false;
    const bool v = evaluate(id, local_taint);
    active_.erase(id);
    // Results that leaned on an in-progress assumption are not final.
    if (local_taint)
        tainted = true;
    else
        memo_.emplace(id, v);
    return v;
}

bool Oracle::evaluate(const TxId& id, bool& tainted)
{
    const auto* tx = find(id);
    if (tx == nullptr || tx->sender != id.sender)
        return false;
    if (!confirmed(id.sender, id.height))
        return false;

    if (tx->sources.empty())
        return id.height == 1 && id.index == 1 && tx->sender == tx->receiver && tx->amount == 0;

    unsigned __int128 total = 0;
    for (const auto& src : tx->sources) {
        const auto* s = find(src);
        if (s == nullptr)
            return false;
        if (s->sender != tx->sender && s->receiver != tx->sender)
            return false;
        if (s->receiver == tx->sender)
            total += s->amount;
        if (s->sender == tx->sender)
            total += s->remainder;
    }
    if (total != static_cast<unsigned __int128>(tx->amount) + tx->remainder)
        return false;

    for (const auto& src : tx->sources) {
        if (!valid_rec(src, tainted))
            return false;
    }

    // An earlier valid spend of any source in the sender's own chain.
    const auto& chain = world_->chains.at(id.sender);
    for (height_t k = 1; k <= id.height; ++k) {
        const auto& txs = chain.at(k)->txs();
        const std::uint32_t limit = k == id.height ? id.index - 1 : static_cast<std::uint32_t>(txs.size());
        for (std::uint32_t l = 1; l <= limit; ++l) {
            const auto& other = txs[l - 1];
            bool overlap = false;
            for (const auto& s : other.sources) {
                for (const auto& mine : tx->sources)
                    overlap = overlap || s == mine;
            }
            if (overlap && valid_rec(TxId { id.sender, k, l }, tainted))
                return false;
        }
    }
    return true;
}

oracle_verdict oracle_validate(const TxId& target, const World& world)
{
    Oracle o { world };
    return o.validate(target);
}

} // namespace vtl
