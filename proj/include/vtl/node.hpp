#pragma once

#include <map>
#include <optional>
#include <set>

#include <vtl/rng.hpp>
#include <vtl/store.hpp>

namespace vtl {

enum class behavior {
    honest,
    double_spender,
    inflator,
    equivocator,
    proof_withholder,
};

std::string_view to_string(behavior b);
std::optional<behavior> parse_behavior(std::string_view s);

struct BehaviorProfile {
    behavior kind = behavior::honest;
    // Test-only: claims to hold every block in knowledge announcements.
    bool lies_about_knowledge = false;

    bool honest() const { return kind == behavior::honest && !lies_about_knowledge; }
};

// Simulated wire messages. Sizes feed the communication-cost accounting.
struct TransactionAnnounce {
    TxId id;
    Transaction tx;
    std::vector<BlockPtr> delta;
};

struct ProofRequest {
    TxId id;
    NodeId requester;
    ChainHeights knowledge;
};

struct ProofResponse {
    TxId id;
    NodeId responder;
    std::vector<BlockPtr> delta;
};

struct KnowledgeAnnounce {
    NodeId from;
    ChainHeights coords;
};

std::size_t delta_bytes(const std::vector<BlockPtr>& delta);
std::size_t wire_size(const TransactionAnnounce& m);
std::size_t wire_size(const ProofRequest& m);
std::size_t wire_size(const ProofResponse& m);
std::size_t wire_size(const KnowledgeAnnounce& m);

struct insufficient_funds_error : error {
    using error::error;
};

enum class source_policy {
    // Fewest new chains, then fewest sources.
    frugal,
    // Fewest new chains only; free sources are combined as they come.
    naive,
};

std::string_view to_string(source_policy p);
std::optional<source_policy> parse_source_policy(std::string_view s);

// Owned, validated and unspent values with their amounts.
struct Wallet {
    std::map<TxId, amount_t> unspent;
    amount_t total() const;
};

enum class receive_status {
    accepted,
    // Validation said unknown; a proof request follows next round.
    retry,
    // Retry cap reached.
    abandoned,
    // Not addressed to this node, or already settled.
    ignored,
};

struct ReceiveOutcome {
    TxId id;
    receive_status status = receive_status::ignored;
    Validation validation;
};

// A transaction of this node that has been sealed into a confirmed block.
struct Confirmed {
    TxId id;
    Transaction tx;
};

// Per-node protocol state: own chain, local store, wallet, and peer knowledge. All interaction with other
// nodes goes through the message structs above.
class Node {
public:
    Node(NodeId id, amount_t initial_value, BehaviorProfile profile, KeyPair key, std::uint32_t retry_cap = 3);

    NodeId id() const { return id_; }
    const BehaviorProfile& profile() const { return profile_; }
    source_policy policy() const { return policy_; }
    void set_policy(source_policy p) { policy_ = p; }
    const IndividualChain& chain() const { return chain_; }
    LocalStore& store() { return store_; }
    const LocalStore& store() const { return store_; }
    const Wallet& wallet() const { return wallet_; }
    const std::vector<Transaction>& pending() const { return pending_; }
    std::optional<height_t> in_flight() const { return in_flight_; }
    const ChainHeights& collected(NodeId peer) const;
    // Value locked in pending or unconfirmed own transactions.
    amount_t locked() const;

    Abstract genesis_abstract() const;

    // Source selection minimising the chains the receiver lacks; exact for small wallets, greedy otherwise.
    std::vector<TxId> smart_transact(NodeId receiver, amount_t amount, const MainChain& log);

    // Builds a transaction into the pending block. Returns nothing when funds are insufficient.
    std::optional<Transaction> create_transaction(NodeId receiver, amount_t amount, const MainChain& log, Rng& rng);

    // Seals the pending block and returns the abstract(s) to submit when no abstract is in flight.
    std::vector<Abstract> maybe_submit_abstract(const MainChain& log, Rng& rng);

    // Settles an in-flight block once its abstract is on the main chain: credits change and emits one
    // announcement per transaction.
    std::vector<Confirmed> poll_confirmation(const MainChain& log);
    TransactionAnnounce announce(const Confirmed& c, const MainChain& log);

    ReceiveOutcome receive_transaction(const TransactionAnnounce& m, const MainChain& log, const Pki& pki);
    ProofResponse handle_proof_request(const ProofRequest& req, const MainChain& log);
    ReceiveOutcome on_proof_response(const ProofResponse& resp, const MainChain& log, const Pki& pki);

    // Proof requests for transactions still awaiting a proof. Transactions past the retry cap are abandoned
    // and reported through `abandoned`.
    std::vector<std::pair<NodeId, ProofRequest>> proof_requests(std::vector<TxId>& abandoned);

    // A lying node claims every chain of nodes 1..n in full.
    KnowledgeAnnounce announce_knowledge(std::uint32_t n) const;
    void on_knowledge(const KnowledgeAnnounce& m);

    // Chains appearing in the proofs of all currently owned values, counting the sources of own
    // transactions not yet confirmed.
    std::set<NodeId> acquired_chains(const MainChain& log);

private:
    struct Fetch {
        Transaction tx;
        std::uint32_t attempts = 0;
    };

    std::vector<TxId> choose_exact(const std::vector<std::pair<TxId, amount_t>>& ut, const std::vector<std::vector<NodeId>>& fresh, amount_t amount) const;
    std::vector<TxId> choose_greedy(const std::vector<std::pair<TxId, amount_t>>& ut, const std::vector<std::vector<NodeId>>& fresh, amount_t amount) const;
    ReceiveOutcome settle(const TxId& id, const Transaction& tx, std::span<const BlockPtr> delta, const MainChain& log, const Pki& pki);

    NodeId id_;
    BehaviorProfile profile_;
    KeyPair key_;
    std::uint32_t retry_cap_;
    source_policy policy_ = source_policy::frugal;
    IndividualChain chain_;
    LocalStore store_;
    Wallet wallet_;
    std::vector<Transaction> pending_;
    std::optional<height_t> in_flight_;
    std::optional<BlockPtr> alternative_;
    std::map<NodeId, ChainHeights> collected_;
    std::map<TxId, Fetch> fetching_;
    std::set<TxId> settled_;
    // Sources this node spent in confirmed blocks; a double spender draws from these.
    std::vector<TxId> spent_;
};

} // namespace vtl
