#include <vtl/simulator.hpp>

#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace vtl {

std::string_view to_string(topology_kind k)
{
    switch (k) {
    case topology_kind::ring: return "ring";
    case topology_kind::erdos_renyi: return "erdosRenyi";
    case topology_kind::cliques: return "cliques";
    }
    return "?";
}

std::string_view to_string(knowledge_mode m)
{
    return m == knowledge_mode::interactive ? "interactive" : "noninteractive";
}

void ScenarioConfig::validate() const
{
    if (n < 2)
        throw config_error("N", "must be at least 2");
    switch (topology.kind) {
    case topology_kind::ring:
        if (topology.c < 1 || topology.c >= n)
            throw config_error("topology.c", "must satisfy 1 <= c < N (c=" + std::to_string(topology.c) + ", N=" + std::to_string(n) + ")");
        break;
    case topology_kind::erdos_renyi:
        if (!(topology.p > std::log(static_cast<double>(n)) / n) || topology.p > 1)
            throw config_error("topology.p", "must satisfy ln N / N < p <= 1");
        if (!(topology.weight_mean >= 0))
            throw config_error("topology.weightMean", "must be non-negative");
        break;
    case topology_kind::cliques:
        if (topology.clique_size < 2 || n % topology.clique_size != 0)
            throw config_error("topology.size", "must be at least 2 and divide N");
        break;
    }
    if (!(tx_rate >= 0))
        throw config_error("txRate", "must be non-negative");
    if (amount_lo < 1 || amount_hi < amount_lo)
        throw config_error("amount", "needs 1 <= lo <= hi");
    if (initial_value < 1)
        throw config_error("initialValue", "must be positive");
    if (rounds < 1)
        throw config_error("rounds", "must be positive");
    if (tail_window > rounds)
        throw config_error("tailWindow", "must not exceed rounds");
    if (confirm_latency < 1)
        throw config_error("confirmLatency", "must be at least 1");
    std::set<NodeId> seen;
    for (const auto& b : byzantine) {
        if (b.node.value < 1 || b.node.value > n)
            throw config_error("byzantine", "node " + to_string(b.node) + " outside 1..N");
        if (!seen.insert(b.node).second)
            throw config_error("byzantine", "node " + to_string(b.node) + " listed twice");
    }
    if (seen.size() > (n - 1) / 3)
        throw config_error("byzantine", "at most floor((N-1)/3) = " + std::to_string((n - 1) / 3) + " nodes may deviate");
}

std::uint64_t ScenarioConfig::effective_tail() const
{
    return tail_window > 0 ? tail_window : std::max<std::uint64_t>(1, rounds / 4);
}

double ScenarioConfig::topology_param() const
{
    switch (topology.kind) {
    case topology_kind::ring: return topology.c;
    case topology_kind::erdos_renyi: return topology.p;
    case topology_kind::cliques: return topology.clique_size;
    }
    return 0;
}

log_level log_level_from_env()
{
    const char* v = std::getenv("VTL_LOG");
    if (v == nullptr)
        return log_level::summary;
    const std::string_view s { v };
    if (s == "off")
        return log_level::off;
    if (s == "summary" || s.empty())
        return log_level::summary;
    if (s == "events")
        return log_level::events;
    throw config_error("VTL_LOG", "expected off, summary or events, got '" + std::string(s) + "'");
}

Simulator::Simulator(ScenarioConfig cfg, log_level level)
    : cfg_(std::move(cfg))
    , level_(level)
    , rng_(cfg_.seed)
{
    cfg_.validate();
    switch (cfg_.topology.kind) {
    case topology_kind::ring:
        graph_ = gen_ring(cfg_.n, cfg_.topology.c);
        break;
    case topology_kind::erdos_renyi: {
        // The graph stream is separate from the workload stream.
        auto er = gen_erdos_renyi(cfg_.n, cfg_.topology.p, cfg_.topology.weight_mean, cfg_.seed ^ 0x5A17C0DEULL,
            [this](std::uint64_t s) { event("round=0 kind=topology-retry seed=" + std::to_string(s)); });
        graph_ = std::move(er.graph);
        metrics_.topology_retries = er.retries;
        break;
    }
    case topology_kind::cliques:
        graph_ = gen_cliques(cfg_.n, cfg_.topology.clique_size);
        break;
    }
    metrics_.weight_factor = weight_factor(graph_);
    out_.resize(cfg_.n + 1);
    in_.resize(cfg_.n + 1);
    for (const auto& e : graph_.edges) {
        out_[e.from.value].push_back(e);
        in_[e.to.value].push_back(e.from);
    }

    pki_ = std::make_unique<Pki>();
    log_ = std::make_unique<MainChain>(*pki_);
    std::map<NodeId, BehaviorProfile> profiles;
    for (const auto& b : cfg_.byzantine)
        profiles[b.node] = b.profile;
    for (std::uint32_t i = 1; i <= cfg_.n; ++i) {
        const NodeId id { i };
        auto key = KeyPair::derive(id, cfg_.seed, cfg_.scheme);
        pki_->add(id, key.public_key());
        nodes_.push_back(std::make_unique<Node>(id, cfg_.initial_value, profiles[id], std::move(key), cfg_.retry_cap));
        nodes_.back()->set_policy(cfg_.selection);
    }
    // Main-chain round 1 carries every genesis abstract.
    for (const auto& n : nodes_)
        log_->submit(n->genesis_abstract());
    log_->seal();
    created_.resize(cfg_.n + 1);
    g_sum_.assign(cfg_.n, 0.0);
}

const TxRecord* Simulator::record(const TxId& id) const
{
    const auto it = record_index_.find(id);
    return it == record_index_.end() ? nullptr : &records_[it->second];
}

bool Simulator::is_honest(NodeId id) const
{
    return nodes_.at(id.value - 1)->profile().honest();
}

World Simulator::world() const
{
    World w;
    for (const auto& n : nodes_)
        w.chains.emplace(n->id(), n->chain());
    w.log = log_.get();
    return w;
}

std::size_t Simulator::measure_g(NodeId id)
{
    return node(id).acquired_chains(*log_).size();
}

void Simulator::event(const std::string& line)
{
    if (level_ == log_level::events)
        events_.push_back(line);
}

void Simulator::handle(const ReceiveOutcome& out)
{
    const auto it = record_index_.find(out.id);
    if (it == record_index_.end())
        return;
    auto& rec = records_[it->second];
    if (out.status == receive_status::ignored)
        return;
    rec.last_validation = out.validation;
    if (out.status == receive_status::accepted) {
        rec.state = tx_state::accepted;
        rec.settled_round = round_;
        ++metrics_.accepted;
        event("round=" + std::to_string(round_) + " kind=accept tx=" + to_string(out.id) + " receiver=" + to_string(rec.receiver));
    } else {
        event("round=" + std::to_string(round_) + " kind=unknown tx=" + to_string(out.id) + " reason=" + std::string(to_string(out.validation.why)));
    }
}

void Simulator::step()
{
    ++round_;
    const std::uint64_t r = round_;

    if (cfg_.mode == knowledge_mode::interactive) {
        for (const auto& v : nodes_) {
            const auto m = v->announce_knowledge(cfg_.n);
            for (const auto& u : in_[v->id().value]) {
                node(u).on_knowledge(m);
                metrics_.knowledge_bytes += wire_size(m);
            }
        }
    }

    // Proof requests for transactions that failed validation in earlier rounds.
    for (const auto& v : nodes_) {
        std::vector<TxId> abandoned;
        const auto requests = v->proof_requests(abandoned);
        for (const auto& id : abandoned) {
            ++metrics_.rejected;
            if (const auto it = record_index_.find(id); it != record_index_.end()) {
                records_[it->second].state = tx_state::abandoned;
                records_[it->second].settled_round = r;
            }
            event("round=" + std::to_string(r) + " kind=abandon tx=" + to_string(id) + " receiver=" + to_string(v->id()));
        }
        for (const auto& [to, req] : requests) {
            metrics_.request_bytes += wire_size(req);
            const auto resp = node(to).handle_proof_request(req, *log_);
            metrics_.proof_blocks += resp.delta.size();
            metrics_.proof_bytes += wire_size(resp);
            handle(v->on_proof_response(resp, *log_, *pki_));
        }
    }

    // Settlement of newly confirmed blocks.
    for (const auto& v : nodes_) {
        for (const auto& c : v->poll_confirmation(*log_)) {
            auto& pending = created_[v->id().value];
            std::uint64_t created = r;
            for (auto it = pending.begin(); it != pending.end(); ++it) {
                if (it->first == c.tx) {
                    created = it->second;
                    pending.erase(it);
                    break;
                }
            }
            record_index_.emplace(c.id, records_.size());
            records_.push_back(TxRecord { c.id, c.tx.sender, c.tx.receiver, c.tx.amount, created, r, 0, tx_state::in_transit, {} });
            ++metrics_.tx_count;

            const auto m = v->announce(c, *log_);
            metrics_.proof_blocks += m.delta.size();
            metrics_.proof_bytes += wire_size(m);
            handle(node(c.tx.receiver).receive_transaction(m, *log_, *pki_));
        }
    }

    // Workload: each edge fires Poisson(txRate * w / W_out) times.
    for (const auto& v : nodes_) {
        const auto& edges = out_[v->id().value];
        double total = 0;
        for (const auto& e : edges)
            total += e.weight;
        for (const auto& e : edges) {
            const auto k = rng_.poisson(cfg_.tx_rate * e.weight / total);
            for (std::uint64_t i = 0; i < k; ++i) {
                const amount_t amount = rng_.uniform(cfg_.amount_lo, cfg_.amount_hi);
                auto tx = v->create_transaction(e.to, amount, *log_, rng_);
                if (!tx) {
                    ++metrics_.skipped;
                    event("round=" + std::to_string(r) + " kind=skip sender=" + to_string(v->id()) + " receiver=" + to_string(e.to) + " amount=" + std::to_string(amount));
                    continue;
                }
                ++metrics_.created;
                created_[v->id().value].emplace_back(std::move(*tx), r);
            }
        }
    }

    for (const auto& v : nodes_) {
        for (auto& a : v->maybe_submit_abstract(*log_, rng_)) {
            metrics_.mainchain_bytes += 8 + 8 + 32 + a.signature.size();
            log_->submit(std::move(a), cfg_.confirm_latency - 1);
        }
    }
    log_->seal();

    const auto& eq = log_->equivocations();
    for (; equivocations_seen_ < eq.size(); ++equivocations_seen_) {
        const auto& e = eq[equivocations_seen_];
        event("round=" + std::to_string(r) + " kind=equivocation node=" + to_string(e.node) + " height=" + std::to_string(e.height));
    }

    double sum = 0;
    const bool tail = r + cfg_.effective_tail() > cfg_.rounds;
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
        const double g = static_cast<double>(measure_g(NodeId { i + 1 }));
        sum += g;
        if (tail)
            g_sum_[i] += g;
    }
    if (tail)
        ++tail_rounds_;
    metrics_.timeline.push_back(sum / nodes_.size());
    check_conservation();
}

void Simulator::check_conservation()
{
    if (!cfg_.byzantine.empty())
        return;
    // Value is either owned, locked in an own unconfirmed transaction, or travelling to its receiver.
    unsigned __int128 total = 0;
    for (const auto& v : nodes_)
        total += v->wallet().total() + v->locked();
    for (const auto& rec : records_) {
        if (rec.state != tx_state::accepted)
            total += rec.amount;
    }
    if (total != static_cast<unsigned __int128>(cfg_.initial_value) * cfg_.n) {
        metrics_.conserved = false;
        event("round=" + std::to_string(round_) + " kind=conservation-violation");
    }
}

Metrics Simulator::run()
{
    while (round_ < cfg_.rounds)
        step();
    metrics_.equivocations = log_->equivocations().size();
    metrics_.g_per_node.assign(nodes_.size(), 0.0);
    double sum = 0;
    double mx = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double g = tail_rounds_ == 0 ? 0.0 : g_sum_[i] / static_cast<double>(tail_rounds_);
        metrics_.g_per_node[i] = g;
        sum += g;
        mx = std::max(mx, g);
    }
    metrics_.g_avg = sum / static_cast<double>(nodes_.size());
    metrics_.g_max = mx;
    if (metrics_.tx_count > 0) {
        const double t = static_cast<double>(metrics_.tx_count);
        metrics_.ccpt_blocks = static_cast<double>(metrics_.proof_blocks) / t;
        metrics_.ccpt_bytes = static_cast<double>(metrics_.proof_bytes + metrics_.request_bytes + metrics_.knowledge_bytes) / t;
    }
    if (level_ != log_level::off) {
        std::ostringstream os;
        os << "round=" << round_ << " kind=summary txCount=" << metrics_.tx_count << " accepted=" << metrics_.accepted
           << " rejected=" << metrics_.rejected << " skipped=" << metrics_.skipped;
        events_.push_back(os.str());
    }
    return metrics_;
}

Metrics run(const ScenarioConfig& cfg, log_level level)
{
    Simulator sim { cfg, level };
    return sim.run();
}

} // namespace vtl
