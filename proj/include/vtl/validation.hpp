#pragma once

#include <concepts>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include <vtl/bundle.hpp>
#include <vtl/mainchain.hpp>
#include <vtl/post_order.hpp>

namespace vtl {

enum class verdict {
    valid,
    unknown,
};

enum class proof_verdict {
    pass,
    fail,
};

enum class reason {
    none,
    // proof verification
    target_missing,
    sender_mismatch,
    chain_gap,
    bad_linkage,
    abstract_mismatch,
    bad_signature,
    unconfirmed,
    duplicate_target,
    source_proof,
    cycle,
    // validation
    target_mismatch,
    malformed_sources,
    genesis_shape,
    source_missing,
    ownership,
    equality,
    double_spend,
    source_invalid,
};

std::string_view to_string(reason r);
std::string_view to_string(verdict v);
std::string_view to_string(proof_verdict v);

struct ProofCheck {
    proof_verdict result = proof_verdict::fail;
    reason why = reason::none;
    // Transaction whose check failed, which may be a source of the target.
    TxId at;

    bool passed() const { return result == proof_verdict::pass; }
};

struct Validation {
    verdict result = verdict::unknown;
    reason why = reason::none;
    TxId at;

    bool valid() const { return result == verdict::valid; }
};

// Read access the validation algorithms need. `verified_through(u)` reports a prefix of u's chain whose
// linkage and on-chain abstracts are already known to be good; `known_valid` reports cached verdicts.
template <typename V>
concept BlockView = requires(const V& v, NodeId n, height_t h, const Hash& d, const std::vector<TxId>& s, const TxId& id) {
    { v.block(n, h) } -> std::convertible_to<const Block*>;
    { v.top(n) } -> std::convertible_to<height_t>;
    { v.verified_through(n) } -> std::convertible_to<height_t>;
    { v.occurrences(n, d, h) } -> std::convertible_to<std::size_t>;
    { v.shares_source(n, s, h, id) } -> std::convertible_to<bool>;
    { v.known_valid(id) } -> std::convertible_to<bool>;
};

// Proof verification and the validation function over any block view. One instance memoises results for
// the lifetime of a single query tree; results never depend on call order.
template <BlockView View>
class Validator {
public:
    Validator(const View& view, const MainChain& log, const Pki& pki) : view_(&view), log_(&log), pki_(&pki) {}

    // Proof verification for the transaction at `target`: the sender's chain is hash-linked from genesis,
    // every on-chain abstract over it matches and is correctly signed, a confirming abstract exists at or
    // above the target's block, the target occurs exactly once, and the same holds recursively for sources.
    ProofCheck verify(const TxId& target)
    {
        // Deep source graphs are evaluated bottom-up so the recursion below stays shallow.
        for (const auto& id : ancestry(target, [this](const TxId& t) { return passed_.contains(t) || verify_failed_.contains(t); }))
            verify_rec(id);
        return verify_rec(target);
    }

    // The validation function: proof check, equality check, double-spending check, source check.
    Validation validate(const TxId& target, const Transaction& tx)
    {
        // Cached verdicts are per position, so the claimed content is matched first.
        if (const auto* located = locate(target); located == nullptr)
            return unknown(reason::target_missing, target);
        else if (!(*located == tx))
            return unknown(reason::target_mismatch, target);
        for (const auto& id : ancestry(target, [this](const TxId& t) { return valid_.contains(t) || invalid_.contains(t); })) {
            if (id == target)
                continue;
            verify_rec(id);
            if (const auto* t = locate(id))
                validate_rec(id, *t);
        }
        return validate_rec(target, tx);
    }

    Validation validate(const TxId& target)
    {
        const auto* tx = locate(target);
        if (tx == nullptr)
            return unknown(reason::target_missing, target);
        return validate(target, *tx);
    }

    // Transactions this instance found valid; callers may persist them into a cache.
    const std::unordered_set<TxId>& validated() const { return valid_; }

private:
    struct ChainCheck {
        bool ok = false;
        reason why = reason::none;
        height_t absmark = 0;
    };

    static ProofCheck pass() { return { proof_verdict::pass, reason::none, {} }; }
    static ProofCheck fail(reason r, const TxId& at) { return { proof_verdict::fail, r, at }; }
    static Validation ok() { return { verdict::valid, reason::none, {} }; }
    static Validation unknown(reason r, const TxId& at) { return { verdict::unknown, r, at }; }

    template <typename Known>
    std::vector<TxId> ancestry(const TxId& root, Known&& known) const
    {
        return post_order(
            root,
            [this](const TxId& id, std::vector<TxId>& out) {
                if (const auto* t = locate(id))
                    out.insert(out.end(), t->sources.begin(), t->sources.end());
            },
            [this, &known](const TxId& id) { return known(id) || view_->known_valid(id); });
    }

    ProofCheck verify_rec(const TxId& target)
    {
        if (passed_.contains(target) || view_->known_valid(target))
            return pass();
        if (auto it = verify_failed_.find(target); it != verify_failed_.end())
            return it->second;
        if (!verifying_.insert(target).second)
            return fail(reason::cycle, target);
        const auto res = verify_uncached(target);
        verifying_.erase(target);
        if (res.passed())
            passed_.insert(target);
        else if (res.why != reason::cycle)
            verify_failed_.emplace(target, res);
        return res;
    }

    Validation validate_rec(const TxId& target, const Transaction& tx)
    {
        if (valid_.contains(target) || view_->known_valid(target))
            return ok();
        if (auto it = invalid_.find(target); it != invalid_.end())
            return it->second;
        if (!validating_.insert(target).second)
            return unknown(reason::cycle, target);
        const auto res = validate_uncached(target, tx);
        validating_.erase(target);
        if (res.valid())
            valid_.insert(target);
        else if (res.why != reason::cycle && res.why != reason::target_mismatch)
            invalid_.emplace(target, res);
        return res;
    }

    const Transaction* locate(const TxId& id) const
    {
        const auto* b = view_->block(id.sender, id.height);
        if (b == nullptr || b->owner() != id.sender || b->height() != id.height)
            return nullptr;
        return b->tx_at(id.index);
    }

    const ChainCheck& check_chain(NodeId owner)
    {
        if (auto it = chains_.find(owner); it != chains_.end())
            return it->second;
        ChainCheck c;
        c.ok = true;
        const height_t top = view_->top(owner);
        const height_t trusted = std::min(view_->verified_through(owner), top);
        const Block* prev = trusted > 0 ? view_->block(owner, trusted) : nullptr;
        for (height_t m = trusted + 1; m <= top && c.ok; ++m) {
            const Block* b = view_->block(owner, m);
            if (b == nullptr) {
                c = { false, reason::chain_gap, 0 };
                break;
            }
            if (b->owner() != owner || b->height() != m) {
                c = { false, reason::bad_linkage, 0 };
                break;
            }
            const bool linked = m == 1 ? !b->prev_hash().has_value() : (prev != nullptr && b->prev_hash() == prev->hash());
            if (!linked) {
                c = { false, reason::bad_linkage, 0 };
                break;
            }
            if (const auto* a = log_->find(owner, m); a != nullptr) {
                if (a->block_hash != b->hash()) {
                    c = { false, reason::abstract_mismatch, 0 };
                    break;
                }
                if (!verify_abstract(*a, *pki_)) {
                    c = { false, reason::bad_signature, 0 };
                    break;
                }
            }
            prev = b;
        }
        if (c.ok)
            c.absmark = log_->highest_at_or_below(owner, top).value_or(0);
        return chains_.emplace(owner, c).first->second;
    }

    ProofCheck verify_uncached(const TxId& target)
    {
        const auto* tx = locate(target);
        if (tx == nullptr)
            return fail(reason::target_missing, target);
        if (tx->sender != target.sender)
            return fail(reason::sender_mismatch, target);
        const auto& chain = check_chain(target.sender);
        if (!chain.ok)
            return fail(chain.why, target);
        if (chain.absmark < target.height)
            return fail(reason::unconfirmed, target);
        const auto* b = view_->block(target.sender, target.height);
        if (view_->occurrences(target.sender, b->tx_digests()[target.index - 1], view_->top(target.sender)) != 1)
            return fail(reason::duplicate_target, target);
        for (const auto& src : tx->sources) {
            const auto sub = verify_rec(src);
            if (!sub.passed())
                return sub.why == reason::cycle ? sub : fail(reason::source_proof, sub.at);
        }
        return pass();
    }

    Validation validate_uncached(const TxId& target, const Transaction& tx)
    {
        const auto* located = locate(target);
        if (located == nullptr)
            return unknown(reason::target_missing, target);
        if (!(*located == tx))
            return unknown(reason::target_mismatch, target);

        // Validity-proof check.
        if (const auto pc = verify_rec(target); !pc.passed())
            return unknown(pc.why, pc.at);

        for (std::size_t i = 1; i < tx.sources.size(); ++i) {
            if (!(tx.sources[i - 1] < tx.sources[i]))
                return unknown(reason::malformed_sources, target);
        }

        // Initial values: the lone transaction of a genesis block, sent to oneself.
        if (tx.sources.empty()) {
            if (target.height == 1 && target.index == 1 && tx.is_genesis_shaped() && tx.amount == 0)
                return ok();
            return unknown(reason::genesis_shape, target);
        }

        // Equality check over the shares of the sources owned by the sender.
        unsigned __int128 in = 0;
        for (const auto& src : tx.sources) {
            const auto* s = locate(src);
            if (s == nullptr)
                return unknown(reason::source_missing, src);
            if (s->receiver != tx.sender && s->sender != tx.sender)
                return unknown(reason::ownership, src);
            in += owned_share(*s, tx.sender);
        }
        const unsigned __int128 out = static_cast<unsigned __int128>(tx.amount) + tx.remainder;
        if (in != out)
            return unknown(reason::equality, target);

        // Double-spending check over the sender's blocks 1..k.
        if (view_->shares_source(target.sender, tx.sources, target.height, target))
            return unknown(reason::double_spend, target);

        // Source check.
        for (const auto& src : tx.sources) {
            const auto sub = validate_rec(src, *locate(src));
            if (!sub.valid())
                return sub.why == reason::cycle ? sub : unknown(reason::source_invalid, sub.at);
        }
        return ok();
    }

    const View* view_;
    const MainChain* log_;
    const Pki* pki_;
    std::unordered_map<NodeId, ChainCheck> chains_;
    std::unordered_set<TxId> passed_;
    std::unordered_map<TxId, ProofCheck> verify_failed_;
    std::unordered_set<TxId> verifying_;
    std::unordered_set<TxId> valid_;
    std::unordered_map<TxId, Validation> invalid_;
    std::unordered_set<TxId> validating_;
};

// Proof verification over a standalone bundle.
ProofCheck verify_proof(const ProofBundle& p, const MainChain& log, const Pki& pki);
// The validation function for `tx` claimed to sit at p.target.
Validation validate(const Transaction& tx, const ProofBundle& p, const MainChain& log, const Pki& pki);

} // namespace vtl
