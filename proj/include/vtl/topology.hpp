#pragma once

#include <functional>
#include <vector>

#include <vtl/types.hpp>

namespace vtl {

struct Edge {
    NodeId from;
    NodeId to;
    double weight = 1.0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

// Weighted directed transaction graph over nodes 1..n. Edges are kept sorted by (from, to).
struct TransactionGraph {
    std::uint32_t n = 0;
    std::vector<Edge> edges;

    std::vector<Edge> out_edges(NodeId u) const;
    std::vector<NodeId> in_neighbors(NodeId v) const;
    bool strongly_connected() const;
};

// Node i sends to i+1, ..., i+c (mod n).
TransactionGraph gen_ring(std::uint32_t n, std::uint32_t c);

struct ErResult {
    TransactionGraph graph;
    // Regenerations needed to obtain a strongly connected graph.
    std::uint32_t retries = 0;
    std::uint64_t seed_used = 0;
};

// Every ordered pair is an edge with probability p, weight 1 + Poisson(weight_mean). A graph that is not
// strongly connected is regenerated with seed + 1; `on_retry` is told about each rejected seed.
ErResult gen_erdos_renyi(std::uint32_t n, double p, double weight_mean, std::uint64_t seed,
    const std::function<void(std::uint64_t)>& on_retry = {});

// Disjoint complete digraphs of `size` consecutive nodes; n must be a multiple of size.
TransactionGraph gen_cliques(std::uint32_t n, std::uint32_t size);

// E[ceil(w / E[w])] over edges.
double weight_factor(const TransactionGraph& g);

} // namespace vtl
