#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include <vtl/ledger.hpp>

namespace vtl {

struct MainChainBlock {
    std::uint64_t round = 0;
    std::vector<Abstract> abstracts;
};

enum class submit_status {
    queued,
    bad_signature,
};

// Two different block hashes were offered for one (node, height); the later one was dropped at sealing.
struct Equivocation {
    NodeId node;
    height_t height = 0;
    std::uint64_t round = 0;
    Hash kept;
    Hash rejected;
};

// In-process, totally ordered and append-only log of abstracts standing in for the BFT main chain.
// Rounds are numbered from 1; round 1 is expected to carry every genesis abstract.
class MainChain {
public:
    explicit MainChain(const Pki& pki) : pki_(&pki) {}

    // Queues an abstract. It is sealed by the `delay`-th next call to seal() (0 = the next one).
    submit_status submit(Abstract a, std::uint64_t delay = 0);

    // Drains the ready part of the queue in (node, height) order, submission order breaking ties.
    const MainChainBlock& seal();

    std::optional<std::uint64_t> round_of(NodeId node, height_t height) const;
    bool is_on_chain(NodeId node, height_t height) const { return find(node, height) != nullptr; }
    const Abstract* find(NodeId node, height_t height) const;

    // Smallest on-chain height >= h for the node, if any.
    std::optional<height_t> lowest_at_or_above(NodeId node, height_t h) const;
    // Largest on-chain height <= h for the node, if any.
    std::optional<height_t> highest_at_or_below(NodeId node, height_t h) const;
    std::optional<height_t> highest(NodeId node) const;

    const std::vector<MainChainBlock>& blocks() const { return blocks_; }
    std::uint64_t rounds() const { return blocks_.size(); }
    std::size_t pending() const { return queue_.size(); }
    const std::vector<Equivocation>& equivocations() const { return equivocations_; }
    std::size_t rejected_at_sealing() const { return rejected_; }
    const Pki& pki() const { return *pki_; }

    // One JSON object per line: round, node, height, hash (hex), sig (hex).
    void dump(std::ostream& os) const;

private:
    struct Entry {
        std::uint64_t round;
        std::size_t position;
    };
    struct Queued {
        Abstract abstract;
        std::uint64_t delay;
        std::uint64_t seq;
    };

    const Pki* pki_;
    std::vector<MainChainBlock> blocks_;
    std::map<NodeId, std::map<height_t, Entry>> index_;
    std::vector<Queued> queue_;
    std::uint64_t seq_ = 0;
    std::vector<Equivocation> equivocations_;
    std::size_t rejected_ = 0;
};

// Block b is confirmed when some on-chain abstract A_{u,k'} with k' >= b.height exists and every on-chain
// abstract A_{u,l}, l <= k', matches the hash of block l of `chain`.
bool is_confirmed(const Block& b, const IndividualChain& chain, const MainChain& log);

// Parses a dump() stream back into rounds of abstracts.
std::vector<MainChainBlock> load_mainchain_dump(std::istream& is);
// Rebuilds a log by replaying dumped rounds; signatures are re-verified on the way in.
MainChain replay_mainchain(const Pki& pki, const std::vector<MainChainBlock>& rounds);

} // namespace vtl
