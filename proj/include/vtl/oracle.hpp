#pragma once

#include <map>
#include <unordered_map>
#include <unordered_set>

#include <vtl/mainchain.hpp>

namespace vtl {

// Omniscient view of a run: every node's true chain and the main-chain log. Test-only.
struct World {
    std::map<NodeId, IndividualChain> chains;
    const MainChain* log = nullptr;
};

enum class oracle_verdict {
    valid,
    invalid,
};

// Direct evaluation of transaction validity by global recursion over the true chains: confirmed and
// authorized, valid sources owned by the sender, value equality, and no valid transaction earlier in the
// sender's chain spending any of the same sources. Cyclic dependencies are invalid.
class Oracle {
public:
    explicit Oracle(const World& world) : world_(&world) {}

    oracle_verdict validate(const TxId& target);

private:
    const Transaction* find(const TxId& id) const;
    bool confirmed(NodeId owner, height_t h);
    bool evaluate(const TxId& id, bool& tainted);
    bool valid_rec(const TxId& id, bool& tainted);

    const World* world_;
    std::map<BlockKey, bool> confirmed_;
    std::unordered_map<TxId, bool> memo_;
    std::unordered_set<TxId> active_;
};

oracle_verdict oracle_validate(const TxId& target, const World& world);

} // namespace vtl
