#include <vtl/topology.hpp>

#include <algorithm>
#include <cmath>

#include <vtl/rng.hpp>

namespace vtl {

std::vector<Edge> TransactionGraph::out_edges(NodeId u) const
{
    std::vector<Edge> out;
    for (const auto& e : edges) {
        if (e.from == u)
            out.push_back(e);
    }
    return out;
}

std::vector<NodeId> TransactionGraph::in_neighbors(NodeId v) const
{
    std::vector<NodeId> out;
    for (const auto& e : edges) {
        if (e.to == v)
            out.push_back(e.from);
    }
    return out;
}

namespace {

std::vector<bool> reach(std::uint32_t n, const std::vector<std::vector<std::uint32_t>>& adj)
{
    std::vector<bool> seen(n + 1, false);
    std::vector<std::uint32_t> stack { 1 };
    seen[1] = true;
    while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        for (auto v : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                stack.push_back(v);
            }
        }
    }
    return seen;
}

} // namespace

bool TransactionGraph::strongly_connected() const
{
    if (n <= 1)
        return true;
    std::vector<std::vector<std::uint32_t>> fwd(n + 1), rev(n + 1);
    for (const auto& e : edges) {
        fwd[e.from.value].push_back(e.to.value);
        rev[e.to.value].push_back(e.from.value);
    }
    const auto a = reach(n, fwd);
    const auto b = reach(n, rev);
    for (std::uint32_t i = 1; i <= n; ++i) {
        if (!a[i] || !b[i])
            return false;
    }
    return true;
}

TransactionGraph gen_ring(std::uint32_t n, std::uint32_t c)
{
    if (c < 1 || c >= n)
        throw error("ring: c must satisfy 1 <= c < N (c=" + std::to_string(c) + ", N=" + std::to_string(n) + ")");
    TransactionGraph g;
    g.n = n;
    for (std::uint32_t u = 1; u <= n; ++u) {
        std::vector<Edge> row;
        for (std::uint32_t j = 1; j <= c; ++j)
            row.push_back(Edge { NodeId { u }, NodeId { (u - 1 + j) % n + 1 }, 1.0 });
        std::sort(row.begin(), row.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
        g.edges.insert(g.edges.end(), row.begin(), row.end());
    }
    return g;
}

ErResult gen_erdos_renyi(std::uint32_t n, double p, double weight_mean, std::uint64_t seed, const std::function<void(std::uint64_t)>& on_retry)
{
    if (n < 2)
        throw error("erdos-renyi: N must be at least 2");
    if (!(p > 0 && p <= 1))
        throw error("erdos-renyi: p must lie in (0, 1]");
    ErResult res;
    for (std::uint64_t s = seed;; ++s) {
        Rng rng { s };
        TransactionGraph g;
        g.n = n;
        for (std::uint32_t u = 1; u <= n; ++u) {
            for (std::uint32_t v = 1; v <= n; ++v) {
                if (u == v)
                    continue;
                if (rng.uniform01() < p)
                    g.edges.push_back(Edge { NodeId { u }, NodeId { v }, 1.0 + static_cast<double>(rng.poisson(weight_mean)) });
            }
        }
        if (g.strongly_connected()) {
            res.graph = std::move(g);
            res.seed_used = s;
            return res;
        }
        ++res.retries;
        if (on_retry)
            on_retry(s);
        if (res.retries > 10000)
            throw error("erdos-renyi: no strongly connected graph after 10000 attempts");
    }
}

TransactionGraph gen_cliques(std::uint32_t n, std::uint32_t size)
{
    if (size < 2 || n % size != 0)
        throw error("cliques: size must be >= 2 and divide N");
    TransactionGraph g;
    g.n = n;
    for (std::uint32_t u = 1; u <= n; ++u) {
        const std::uint32_t base = (u - 1) / size * size;
        for (std::uint32_t v = base + 1; v <= base + size; ++v) {
            if (v != u)
                g.edges.push_back(Edge { NodeId { u }, NodeId { v }, 1.0 });
        }
    }
    return g;
}

double weight_factor(const TransactionGraph& g)
{
    if (g.edges.empty())
        return 1.0;
    double sum = 0;
    for (const auto& e : g.edges)
        sum += e.weight;
    const double mean = sum / static_cast<double>(g.edges.size());
    double acc = 0;
    for (const auto& e : g.edges)
        acc += std::ceil(e.weight / mean);
    return acc / static_cast<double>(g.edges.size());
}

} // namespace vtl
