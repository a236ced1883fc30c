#include <vtl/node.hpp>

#include <algorithm>
#include <limits>

namespace vtl {

std::string_view to_string(behavior b)
{
    switch (b) {
    case behavior::honest: return "honest";
    case behavior::double_spender: return "doubleSpender";
    case behavior::inflator: return "inflator";
    case behavior::equivocator: return "equivocator";
    case behavior::proof_withholder: return "proofWithholder";
    }
    return "?";
}

std::optional<behavior> parse_behavior(std::string_view s)
{
    for (auto b : { behavior::honest, behavior::double_spender, behavior::inflator, behavior::equivocator, behavior::proof_withholder }) {
        if (to_string(b) == s)
            return b;
    }
    return std::nullopt;
}

std::string_view to_string(source_policy p)
{
    return p == source_policy::naive ? "naive" : "frugal";
}

std::optional<source_policy> parse_source_policy(std::string_view s)
{
    if (s == "naive")
        return source_policy::naive;
    if (s == "frugal")
        return source_policy::frugal;
    return std::nullopt;
}

namespace {

constexpr std::size_t tx_id_bytes = 24;
constexpr std::size_t coord_bytes = 16;
// Above this many unspent values, source selection falls back to the greedy rule.
constexpr std::size_t exact_limit = 12;
// Share of created transactions in which an adversary deviates.
constexpr double deviation_rate = 0.5;

std::vector<NodeId> set_union(const std::vector<NodeId>& a, const std::vector<NodeId>& b)
{
    std::vector<NodeId> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::size_t count_new(const std::vector<NodeId>& have, const std::vector<NodeId>& add)
{
    std::size_t n = 0;
    auto i = have.begin();
    for (const auto& x : add) {
        while (i != have.end() && *i < x)
            ++i;
        if (i == have.end() || *i != x)
            ++n;
    }
    return n;
}

} // namespace

std::size_t delta_bytes(const std::vector<BlockPtr>& delta)
{
    std::size_t n = 8;
    for (const auto& b : delta)
        n += b->encoded_size();
    return n;
}

std::size_t wire_size(const TransactionAnnounce& m)
{
    return tx_id_bytes + canonical_encode(m.tx).size() + delta_bytes(m.delta);
}

std::size_t wire_size(const ProofRequest& m)
{
    return tx_id_bytes + 4 + 8 + coord_bytes * m.knowledge.size();
}

std::size_t wire_size(const ProofResponse& m)
{
    return tx_id_bytes + 4 + delta_bytes(m.delta);
}

std::size_t wire_size(const KnowledgeAnnounce& m)
{
    return 4 + 8 + coord_bytes * m.coords.size();
}

amount_t Wallet::total() const
{
    amount_t t = 0;
    for (const auto& [id, v] : unspent)
        t += v;
    return t;
}

Node::Node(NodeId id, amount_t initial_value, BehaviorProfile profile, KeyPair key, std::uint32_t retry_cap)
    : id_(id)
    , profile_(profile)
    , key_(std::move(key))
    , retry_cap_(retry_cap)
    , chain_(id, initial_value)
    , store_(id)
{
    store_.append_own(chain_.ptr_at(1));
    wallet_.unspent.emplace(TxId { id, 1, 1 }, initial_value);
}

const ChainHeights& Node::collected(NodeId peer) const
{
    static const ChainHeights none;
    const auto it = collected_.find(peer);
    return it == collected_.end() ? none : it->second;
}

amount_t Node::locked() const
{
    amount_t v = 0;
    for (const auto& t : pending_)
        v += t.amount + t.remainder;
    if (in_flight_) {
        for (const auto& t : chain_.at(*in_flight_)->txs())
            v += t.amount + t.remainder;
    }
    return v;
}

Abstract Node::genesis_abstract() const
{
    return make_abstract(key_, *chain_.at(1));
}

std::vector<TxId> Node::smart_transact(NodeId receiver, amount_t amount, const MainChain& log)
{
    if (wallet_.total() < amount)
        throw insufficient_funds_error("node " + to_string(id_) + " cannot cover " + std::to_string(amount));

    // Step 1: chains behind every unspent value. Step 2: drop what the receiver already holds.
    const auto& known = collected(receiver);
    std::vector<std::pair<TxId, amount_t>> ut(wallet_.unspent.begin(), wallet_.unspent.end());
    std::vector<std::vector<NodeId>> fresh;
    fresh.reserve(ut.size());
    for (const auto& [id, v] : ut) {
        std::vector<NodeId> f;
        for (const auto& [owner, h] : store_.proof_summary(id, log)) {
            // The sender's own chain is in every proof it sends; the receiver holds its own chain.
            if (owner == id_ || owner == receiver)
                continue;
            const auto k = known.find(owner);
            if (k == known.end() || k->second == 0)
                f.push_back(owner);
        }
        fresh.push_back(std::move(f));
    }
    // Step 3: the cheapest covering source set.
    return ut.size() <= exact_limit ? choose_exact(ut, fresh, amount) : choose_greedy(ut, fresh, amount);
}

std::vector<TxId> Node::choose_exact(const std::vector<std::pair<TxId, amount_t>>& ut, const std::vector<std::vector<NodeId>>& fresh, amount_t amount) const
{
    const std::size_t n = ut.size();
    std::vector<unsigned __int128> suffix(n + 1, 0);
    for (std::size_t i = n; i-- > 0;)
        suffix[i] = suffix[i + 1] + ut[i].second;

    std::size_t best_new = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> best;
    std::vector<std::size_t> chosen;

    // Candidates are visited with indices ascending, so picks are sorted by TxId already.
    auto better = [&](std::size_t fresh_count) {
        if (fresh_count != best_new)
            return fresh_count < best_new;
        if (policy_ == source_policy::frugal && chosen.size() != best.size())
            return chosen.size() < best.size();
        return std::lexicographical_compare(chosen.begin(), chosen.end(), best.begin(), best.end());
    };

    auto dfs = [&](auto&& self, std::size_t i, unsigned __int128 sum, const std::vector<NodeId>& chains) -> void {
        if (sum >= amount) {
            if (better(chains.size())) {
                best_new = chains.size();
                best = chosen;
            }
            return;
        }
        if (i == n || sum + suffix[i] < amount)
            return;
        // Adding sources never removes chains, and any completion needs at least one more source.
        if (chains.size() > best_new)
            return;
        if (policy_ == source_policy::frugal && chains.size() == best_new && chosen.size() + 1 > best.size())
            return;
        chosen.push_back(i);
        self(self, i + 1, sum + ut[i].second, set_union(chains, fresh[i]));
        chosen.pop_back();
        self(self, i + 1, sum, chains);
    };
    dfs(dfs, 0, 0, {});

    std::vector<TxId> out;
    for (auto i : best)
        out.push_back(ut[i].first);
    return out;
}

std::vector<TxId> Node::choose_greedy(const std::vector<std::pair<TxId, amount_t>>& ut, const std::vector<std::vector<NodeId>>& fresh, amount_t amount) const
{
    std::vector<bool> used(ut.size(), false);
    std::vector<NodeId> chains;
    amount_t sum = 0;
    std::vector<TxId> out;
    while (sum < amount) {
        std::size_t pick = ut.size();
        std::tuple<std::size_t, int, long double, TxId> best_key;
        for (std::size_t i = 0; i < ut.size(); ++i) {
            if (used[i])
                continue;
            const bool covers = sum + ut[i].second >= amount;
            std::tuple<std::size_t, int, long double, TxId> key { count_new(chains, fresh[i]), covers ? 0 : 1,
                covers ? 0.0L : -static_cast<long double>(ut[i].second), ut[i].first };
            if (policy_ == source_policy::naive)
                key = { std::get<0>(key), 0, 0.0L, ut[i].first };
            if (pick == ut.size() || key < best_key) {
                pick = i;
                best_key = key;
            }
        }
        used[pick] = true;
        sum += ut[pick].second;
        chains = set_union(chains, fresh[pick]);
        out.push_back(ut[pick].first);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<Transaction> Node::create_transaction(NodeId receiver, amount_t amount, const MainChain& log, Rng& rng)
{
    if (profile_.kind == behavior::double_spender && !spent_.empty() && rng.bernoulli(deviation_rate)) {
        // Re-spends a source already consumed in an earlier block of its own chain.
        const TxId src = spent_[rng.uniform(0, spent_.size() - 1)];
        const auto* s = store_.tx(src);
        const amount_t share = s == nullptr ? 0 : owned_share(*s, id_);
        if (share > 0) {
            const amount_t a = std::min(amount, share);
            Transaction tx { { src }, id_, receiver, a, share - a };
            // A conflicting spend. An exact copy of an earlier transaction would be a replay instead.
            const bool replay = std::find(pending_.begin(), pending_.end(), tx) != pending_.end()
                || store_.occurrences(id_, tx_digest(tx), chain_.height()) > 0;
            if (!replay) {
                pending_.push_back(tx);
                return tx;
            }
        }
    }

    if (wallet_.total() < amount)
        return std::nullopt;
    const auto sources = smart_transact(receiver, amount, log);
    amount_t sum = 0;
    for (const auto& s : sources) {
        sum += wallet_.unspent.at(s);
        wallet_.unspent.erase(s);
    }
    amount_t remainder = sum - amount;
    if (profile_.kind == behavior::inflator && rng.bernoulli(deviation_rate))
        remainder += amount;
    Transaction tx { sources, id_, receiver, amount, remainder };
    pending_.push_back(tx);
    return tx;
}

std::vector<Abstract> Node::maybe_submit_abstract(const MainChain& log, Rng& rng)
{
    (void)log;
    if (in_flight_ || pending_.empty())
        return {};
    std::vector<Abstract> out;
    if (profile_.kind == behavior::equivocator && pending_.size() >= 2) {
        // A second block for the same height with the transactions reordered.
        auto reversed = pending_;
        std::reverse(reversed.begin(), reversed.end());
        auto alt = std::make_shared<const Block>(chain_.next_block(std::move(reversed)));
        const auto& b = chain_.append_block(std::move(pending_));
        out.push_back(make_abstract(key_, b));
        out.push_back(make_abstract(key_, *alt));
        if (rng.bernoulli(0.5))
            std::swap(out[0], out[1]);
        alternative_ = std::move(alt);
    } else {
        const auto& b = chain_.append_block(std::move(pending_));
        out.push_back(make_abstract(key_, b));
    }
    pending_.clear();
    in_flight_ = chain_.height();
    store_.append_own(chain_.ptr_at(chain_.height()));
    return out;
}

std::vector<Confirmed> Node::poll_confirmation(const MainChain& log)
{
    if (!in_flight_)
        return {};
    const height_t h = *in_flight_;
    const auto* a = log.find(id_, h);
    if (a == nullptr)
        return {};
    if (alternative_ && a->block_hash == (*alternative_)->hash()) {
        chain_.replace_tip(*alternative_);
        store_.replace_own_tip(*alternative_);
    }
    alternative_.reset();
    in_flight_.reset();

    std::vector<Confirmed> out;
    const auto& txs = chain_.at(h)->txs();
    for (std::uint32_t l = 1; l <= txs.size(); ++l) {
        const TxId id { id_, h, l };
        const auto& tx = txs[l - 1];
        if (const auto share = owned_share(tx, id_); share > 0)
            wallet_.unspent[id] += share;
        spent_.insert(spent_.end(), tx.sources.begin(), tx.sources.end());
        out.push_back(Confirmed { id, tx });
    }
    return out;
}

TransactionAnnounce Node::announce(const Confirmed& c, const MainChain& log)
{
    TransactionAnnounce m { c.id, c.tx, {} };
    if (profile_.kind == behavior::proof_withholder)
        return m;
    const auto& summary = store_.proof_summary(c.id, log);
    auto& known = collected_[c.tx.receiver];
    m.delta = store_.delta(summary, known);
    merge_max(known, summary);
    return m;
}

ReceiveOutcome Node::settle(const TxId& id, const Transaction& tx, std::span<const BlockPtr> delta, const MainChain& log, const Pki& pki)
{
    ReceiveOutcome out;
    out.id = id;
    out.validation = validate_in_store(id, tx, store_, delta, log, pki);
    if (out.validation.valid()) {
        wallet_.unspent[id] += owned_share(tx, id_);
        settled_.insert(id);
        fetching_.erase(id);
        // The sender held everything this proof needs.
        merge_max(collected_[tx.sender], store_.proof_summary(id, log));
        out.status = receive_status::accepted;
        return out;
    }
    fetching_.try_emplace(id, Fetch { tx, 0 });
    out.status = receive_status::retry;
    return out;
}

ReceiveOutcome Node::receive_transaction(const TransactionAnnounce& m, const MainChain& log, const Pki& pki)
{
    if (m.tx.receiver != id_ || m.id.sender == id_ || settled_.contains(m.id) || fetching_.contains(m.id))
        return ReceiveOutcome { m.id, receive_status::ignored, {} };
    return settle(m.id, m.tx, m.delta, log, pki);
}

ProofResponse Node::handle_proof_request(const ProofRequest& req, const MainChain& log)
{
    ProofResponse r { req.id, id_, {} };
    if (profile_.kind == behavior::proof_withholder || req.id.sender != id_)
        return r;
    try {
        r.delta = store_.delta(store_.proof_summary(req.id, log), req.knowledge);
        merge_max(collected_[req.requester], store_.proof_summary(req.id, log));
    } catch (const error&) {
        r.delta.clear();
    }
    return r;
}

ReceiveOutcome Node::on_proof_response(const ProofResponse& resp, const MainChain& log, const Pki& pki)
{
    const auto it = fetching_.find(resp.id);
    if (it == fetching_.end())
        return ReceiveOutcome { resp.id, receive_status::ignored, {} };
    const Transaction tx = it->second.tx;
    return settle(resp.id, tx, resp.delta, log, pki);
}

std::vector<std::pair<NodeId, ProofRequest>> Node::proof_requests(std::vector<TxId>& abandoned)
{
    std::vector<std::pair<NodeId, ProofRequest>> out;
    for (auto it = fetching_.begin(); it != fetching_.end();) {
        if (it->second.attempts >= retry_cap_) {
            abandoned.push_back(it->first);
            settled_.insert(it->first);
            it = fetching_.erase(it);
            continue;
        }
        ++it->second.attempts;
        out.emplace_back(it->first.sender, ProofRequest { it->first, id_, store_.holdings() });
        ++it;
    }
    return out;
}

KnowledgeAnnounce Node::announce_knowledge(std::uint32_t n) const
{
    KnowledgeAnnounce m { id_, store_.holdings() };
    if (profile_.lies_about_knowledge) {
        for (std::uint32_t u = 1; u <= n; ++u)
            m.coords[NodeId { u }] = std::numeric_limits<height_t>::max();
    }
    return m;
}

void Node::on_knowledge(const KnowledgeAnnounce& m)
{
    merge_max(collected_[m.from], m.coords);
}

std::set<NodeId> Node::acquired_chains(const MainChain& log)
{
    std::set<NodeId> out;
    auto add = [&](const TxId& id) {
        for (const auto& [owner, h] : store_.proof_summary(id, log))
            out.insert(owner);
    };
    for (const auto& [id, v] : wallet_.unspent)
        add(id);
    // Change from own unconfirmed transactions is still owned; its proof will cover these sources.
    for (const auto& t : pending_) {
        for (const auto& s : t.sources)
            add(s);
    }
    if (in_flight_) {
        for (const auto& t : chain_.at(*in_flight_)->txs()) {
            for (const auto& s : t.sources)
                add(s);
        }
    }
    return out;
}

} // namespace vtl
