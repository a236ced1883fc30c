#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vtl {

using amount_t = std::uint64_t;
using height_t = std::uint64_t;

// Node identities are 1..N for a run.
struct NodeId {
    std::uint32_t value = 0;

    constexpr NodeId() = default;
    constexpr explicit NodeId(std::uint32_t v) : value(v) {}

    friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

// Position t_{u,k,l}: sender u, block height k, 1-based index l within the block.
struct TxId {
    NodeId sender;
    height_t height = 0;
    std::uint32_t index = 0;

    friend constexpr auto operator<=>(const TxId&, const TxId&) = default;
};

// (owner, height) coordinate of a block.
struct BlockKey {
    NodeId owner;
    height_t height = 0;

    friend constexpr auto operator<=>(const BlockKey&, const BlockKey&) = default;
};

struct Hash {
    std::array<std::uint8_t, 32> bytes {};

    friend constexpr auto operator<=>(const Hash&, const Hash&) = default;

    std::string hex() const;
};

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string to_string(NodeId n);
std::string to_string(const TxId& id);
std::string to_string(const BlockKey& k);

} // namespace vtl

template <>
struct std::hash<vtl::NodeId> {
    std::size_t operator()(const vtl::NodeId& n) const noexcept { return std::hash<std::uint32_t> {}(n.value); }
};

template <>
struct std::hash<vtl::TxId> {
    std::size_t operator()(const vtl::TxId& id) const noexcept
    {
        std::uint64_t h = id.sender.value;
        h = h * 0x9E3779B97F4A7C15ULL ^ id.height;
        h = h * 0x9E3779B97F4A7C15ULL ^ id.index;
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

template <>
struct std::hash<vtl::BlockKey> {
    std::size_t operator()(const vtl::BlockKey& k) const noexcept
    {
        std::uint64_t h = k.owner.value;
        h = h * 0x9E3779B97F4A7C15ULL ^ k.height;
        return static_cast<std::size_t>(h ^ (h >> 31));
    }
};

template <>
struct std::hash<vtl::Hash> {
    std::size_t operator()(const vtl::Hash& h) const noexcept
    {
        std::size_t v = 0;
        for (std::size_t i = 0; i < sizeof(v); ++i)
            v = (v << 8) | h.bytes[i];
        return v;
    }
};
