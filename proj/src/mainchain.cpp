#include <vtl/mainchain.hpp>

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

namespace vtl {

submit_status MainChain::submit(Abstract a, std::uint64_t delay)
{
    if (!verify_abstract(a, *pki_))
        return submit_status::bad_signature;
    queue_.push_back(Queued { std::move(a), delay, seq_++ });
    return submit_status::queued;
}

const MainChainBlock& MainChain::seal()
{
    const std::uint64_t round = blocks_.size() + 1;
    std::vector<Queued> ready;
    std::vector<Queued> waiting;
    for (auto& q : queue_) {
        if (q.delay == 0) {
            ready.push_back(std::move(q));
        } else {
            --q.delay;
            waiting.push_back(std::move(q));
        }
    }
    queue_ = std::move(waiting);
    std::sort(ready.begin(), ready.end(), [](const Queued& x, const Queued& y) {
        if (x.abstract.node != y.abstract.node)
            return x.abstract.node < y.abstract.node;
        if (x.abstract.height != y.abstract.height)
            return x.abstract.height < y.abstract.height;
        return x.seq < y.seq;
    });

    MainChainBlock block;
    block.round = round;
    for (auto& q : ready) {
        auto& per_node = index_[q.abstract.node];
        if (auto it = per_node.find(q.abstract.height); it != per_node.end()) {
            const auto& kept = it->second.round == round ? block.abstracts[it->second.position]
                                                         : blocks_[it->second.round - 1].abstracts[it->second.position];
            if (kept.block_hash != q.abstract.block_hash)
                equivocations_.push_back(Equivocation { q.abstract.node, q.abstract.height, round, kept.block_hash, q.abstract.block_hash });
            ++rejected_;
            continue;
        }
        per_node.emplace(q.abstract.height, Entry { round, block.abstracts.size() });
        block.abstracts.push_back(std::move(q.abstract));
    }
    blocks_.push_back(std::move(block));
    return blocks_.back();
}

const Abstract* MainChain::find(NodeId node, height_t height) const
{
    const auto nit = index_.find(node);
    if (nit == index_.end())
        return nullptr;
    const auto hit = nit->second.find(height);
    if (hit == nit->second.end())
        return nullptr;
    return &blocks_[hit->second.round - 1].abstracts[hit->second.position];
}

std::optional<std::uint64_t> MainChain::round_of(NodeId node, height_t height) const
{
    const auto nit = index_.find(node);
    if (nit == index_.end())
        return std::nullopt;
    const auto hit = nit->second.find(height);
    if (hit == nit->second.end())
        return std::nullopt;
    return hit->second.round;
}

std::optional<height_t> MainChain::lowest_at_or_above(NodeId node, height_t h) const
{
    const auto nit = index_.find(node);
    if (nit == index_.end())
        return std::nullopt;
    const auto it = nit->second.lower_bound(h);
    if (it == nit->second.end())
        return std::nullopt;
    return it->first;
}

std::optional<height_t> MainChain::highest_at_or_below(NodeId node, height_t h) const
{
    const auto nit = index_.find(node);
    if (nit == index_.end())
        return std::nullopt;
    auto it = nit->second.upper_bound(h);
    if (it == nit->second.begin())
        return std::nullopt;
    return std::prev(it)->first;
}

std::optional<height_t> MainChain::highest(NodeId node) const
{
    const auto nit = index_.find(node);
    if (nit == index_.end() || nit->second.empty())
        return std::nullopt;
    return nit->second.rbegin()->first;
}

void MainChain::dump(std::ostream& os) const
{
    for (const auto& b : blocks_) {
        if (b.abstracts.empty()) {
            os << nlohmann::ordered_json { { "round", b.round } }.dump() << '\n';
            continue;
        }
        for (const auto& a : b.abstracts) {
            nlohmann::ordered_json j;
            j["round"] = b.round;
            j["node"] = a.node.value;
            j["height"] = a.height;
            j["hash"] = a.block_hash.hex();
            j["sig"] = to_hex(a.signature);
            os << j.dump() << '\n';
        }
    }
}

std::vector<MainChainBlock> load_mainchain_dump(std::istream& is)
{
    std::vector<MainChainBlock> rounds;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            const auto j = nlohmann::json::parse(line);
            const auto round = j.at("round").get<std::uint64_t>();
            if (round == 0 || round < rounds.size() || round > rounds.size() + 1)
                throw error("rounds must be contiguous from 1");
            if (round == rounds.size() + 1)
                rounds.push_back(MainChainBlock { round, {} });
            if (!j.contains("node"))
                continue;
            Abstract a;
            a.node = NodeId { j.at("node").get<std::uint32_t>() };
            a.height = j.at("height").get<height_t>();
            a.block_hash = hash_from_hex(j.at("hash").get<std::string>());
            a.signature = from_hex(j.at("sig").get<std::string>());
            rounds.back().abstracts.push_back(std::move(a));
        } catch (const std::exception& ex) {
            throw error("main-chain dump line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return rounds;
}

MainChain replay_mainchain(const Pki& pki, const std::vector<MainChainBlock>& rounds)
{
    MainChain log { pki };
    for (const auto& r : rounds) {
        for (const auto& a : r.abstracts) {
            if (log.submit(a) != submit_status::queued)
                throw error("abstract " + to_string(BlockKey { a.node, a.height }) + " in round " + std::to_string(r.round) + " has a bad signature");
        }
        log.seal();
    }
    return log;
}

bool is_confirmed(const Block& b, const IndividualChain& chain, const MainChain& log)
{
    if (chain.owner() != b.owner())
        return false;
    const auto confirming = log.lowest_at_or_above(b.owner(), b.height());
    if (!confirming)
        return false;
    // A failing prefix also fails for every larger k', so the smallest confirming height decides.
    // The prefix must also be hash-linked: compliance is only meaningful for a chain with correct hashes.
    const auto* own = chain.at(b.height());
    if (own == nullptr || own->hash() != b.hash())
        return false;
    for (height_t l = 1; l <= *confirming; ++l) {
        const auto* cb = chain.at(l);
        if (cb == nullptr || cb->owner() != b.owner() || cb->height() != l)
            return false;
        if (l == 1 ? cb->prev_hash().has_value() : cb->prev_hash() != chain.at(l - 1)->hash())
            return false;
        if (const auto* a = log.find(b.owner(), l); a != nullptr && a->block_hash != cb->hash())
            return false;
    }
    return true;
}

} // namespace vtl
