#pragma once

#include <unordered_set>
#include <utility>
#include <vector>

namespace vtl {

// Iterative depth-first post-order from `root`. `children(node, out)` appends the successors of node;
// `skip(node)` prunes nodes whose results are already known. Back edges are ignored.
template <typename Node, typename Children, typename Skip>
std::vector<Node> post_order(const Node& root, Children&& children, Skip&& skip)
{
    std::vector<Node> order;
    std::unordered_set<Node> seen;
    std::vector<std::pair<Node, std::vector<Node>>> stack;
    if (skip(root))
        return order;
    seen.insert(root);
    stack.emplace_back(root, std::vector<Node> {});
    children(root, stack.back().second);
    while (!stack.empty()) {
        auto& [node, pending] = stack.back();
        if (pending.empty()) {
            order.push_back(node);
            stack.pop_back();
            continue;
        }
        Node next = pending.back();
        pending.pop_back();
        if (skip(next) || !seen.insert(next).second)
            continue;
        std::vector<Node> kids;
        children(next, kids);
        stack.emplace_back(std::move(next), std::move(kids));
    }
    return order;
}

} // namespace vtl
