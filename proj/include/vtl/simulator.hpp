#pragma once

#include <memory>
#include <string>
#include <vector>

#include <vtl/node.hpp>
#include <vtl/oracle.hpp>
#include <vtl/topology.hpp>

namespace vtl {

enum class topology_kind {
    ring,
    erdos_renyi,
    cliques,
};

struct TopologySpec {
    topology_kind kind = topology_kind::ring;
    // ring: right-neighbour count
    std::uint32_t c = 1;
    // erdos_renyi: edge probability and mean of the Poisson part of edge weights
    double p = 0;
    double weight_mean = 2.0;
    // cliques: clique size
    std::uint32_t clique_size = 2;
};

enum class knowledge_mode {
    interactive,
    noninteractive,
};

std::string_view to_string(topology_kind k);
std::string_view to_string(knowledge_mode m);

struct ByzantineSpec {
    NodeId node;
    BehaviorProfile profile;
};

struct config_error : error {
    std::string field;
    config_error(std::string f, const std::string& msg) : error(f + ": " + msg), field(std::move(f)) {}
    // `where` is a location such as "ring.yaml:4:6".
    config_error(const std::string& where, std::string f, const std::string& msg) : error(where + ": " + f + ": " + msg), field(std::move(f)) {}
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::uint32_t n = 10;
    TopologySpec topology;
    // Mean transactions per node per round.
    double tx_rate = 1.0;
    amount_t amount_lo = 1;
    amount_t amount_hi = 10;
    amount_t initial_value = 100;
    std::uint64_t rounds = 200;
    // 0 selects the last quarter of the run.
    std::uint64_t tail_window = 0;
    std::uint64_t seed = 1;
    knowledge_mode mode = knowledge_mode::noninteractive;
    std::vector<ByzantineSpec> byzantine;
    // Rounds from abstract submission to sealing, at least 1.
    std::uint64_t confirm_latency = 1;
    std::uint32_t retry_cap = 3;
    source_policy selection = source_policy::frugal;
    sig_scheme scheme = sig_scheme::ed25519;

    // Throws config_error naming the offending field.
    void validate() const;
    std::uint64_t effective_tail() const;
    // Column value for the CSV: c, p or clique size.
    double topology_param() const;
};

enum class tx_state {
    in_transit,
    accepted,
    abandoned,
};

struct TxRecord {
    TxId id;
    NodeId sender;
    NodeId receiver;
    amount_t amount = 0;
    std::uint64_t created_round = 0;
    std::uint64_t confirmed_round = 0;
    std::uint64_t settled_round = 0;
    tx_state state = tx_state::in_transit;
    Validation last_validation;
};

struct Metrics {
    double g_avg = 0;
    double g_max = 0;
    double ccpt_blocks = 0;
    double ccpt_bytes = 0;
    std::uint64_t tx_count = 0;
    std::uint64_t rejected = 0;
    std::uint64_t equivocations = 0;

    std::uint64_t created = 0;
    std::uint64_t skipped = 0;
    std::uint64_t accepted = 0;
    std::uint64_t proof_blocks = 0;
    std::uint64_t proof_bytes = 0;
    std::uint64_t request_bytes = 0;
    std::uint64_t knowledge_bytes = 0;
    std::uint64_t mainchain_bytes = 0;
    double weight_factor = 1.0;
    std::uint32_t topology_retries = 0;
    std::vector<double> g_per_node;
    // Mean g over nodes after every round.
    std::vector<double> timeline;
    bool conserved = true;
};

enum class log_level {
    off,
    summary,
    events,
};

// Reads VTL_LOG; unset means summary. Throws config_error on other values.
log_level log_level_from_env();

// Deterministic round-based simulation. Each round: knowledge announcements (interactive mode), proof
// retries, settlement of confirmed blocks, workload, abstract submission, main-chain seal.
class Simulator {
public:
    explicit Simulator(ScenarioConfig cfg, log_level level = log_level::off);
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    void step();
    Metrics run();

    const ScenarioConfig& config() const { return cfg_; }
    const TransactionGraph& graph() const { return graph_; }
    const MainChain& log() const { return *log_; }
    const Pki& pki() const { return *pki_; }
    Node& node(NodeId id) { return *nodes_.at(id.value - 1); }
    std::uint32_t size() const { return static_cast<std::uint32_t>(nodes_.size()); }
    std::uint64_t round() const { return round_; }
    const std::vector<TxRecord>& records() const { return records_; }
    const TxRecord* record(const TxId& id) const;
    const std::vector<std::string>& events() const { return events_; }
    bool is_honest(NodeId id) const;
    World world() const;
    // g_i: distinct chains behind the node's unspent values.
    std::size_t measure_g(NodeId id);
    const Metrics& metrics() const { return metrics_; }

private:
    void event(const std::string& line);
    void handle(const ReceiveOutcome& out);
    void check_conservation();

    ScenarioConfig cfg_;
    log_level level_;
    TransactionGraph graph_;
    std::unique_ptr<Pki> pki_;
    std::unique_ptr<MainChain> log_;
    std::vector<std::unique_ptr<Node>> nodes_;
    std::vector<std::vector<Edge>> out_;
    std::vector<std::vector<NodeId>> in_;
    Rng rng_;
    std::uint64_t round_ = 0;
    std::vector<TxRecord> records_;
    std::unordered_map<TxId, std::size_t> record_index_;
    // Creation rounds of transactions not yet confirmed, per node.
    std::vector<std::vector<std::pair<Transaction, std::uint64_t>>> created_;
    std::vector<std::string> events_;
    std::size_t equivocations_seen_ = 0;
    Metrics metrics_;
    std::vector<double> g_sum_;
    std::uint64_t tail_rounds_ = 0;
};

// Runs a scenario to completion.
Metrics run(const ScenarioConfig& cfg, log_level level = log_level::off);

} // namespace vtl
