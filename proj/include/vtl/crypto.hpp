#pragma once

#include <map>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <vtl/types.hpp>

namespace vtl {

using bytes = std::vector<std::uint8_t>;

std::string to_hex(std::span<const std::uint8_t> data);
bytes from_hex(std::string_view hex);
Hash hash_from_hex(std::string_view hex);

// SHA-256. The digest function is fixed for the build and reported by hash_name().
Hash sha256(std::span<const std::uint8_t> data);
std::string_view hash_name();

enum class sig_scheme : std::uint8_t {
    // Ed25519 via libsodium.
    ed25519 = 1,
    // Keyed BLAKE2b with the verification key equal to the signing key.
    // Deterministic and fast, NOT secure: fixtures and benchmarks only.
    test_keyed = 2,
};

std::string_view to_string(sig_scheme s);
sig_scheme parse_sig_scheme(std::string_view s);

struct PublicKey {
    sig_scheme scheme = sig_scheme::ed25519;
    bytes key;

    friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

class KeyPair {
public:
    // Derives the key deterministically from seed material, so a (seed, node) pair always yields the same key.
    static KeyPair derive(NodeId node, std::uint64_t seed, sig_scheme scheme = sig_scheme::ed25519);

    NodeId node() const { return node_; }
    const PublicKey& public_key() const { return public_; }
    bytes sign(std::span<const std::uint8_t> msg) const;

private:
    KeyPair() = default;
    NodeId node_;
    bytes secret_;
    PublicKey public_;
};

bool verify_signature(const PublicKey& pk, std::span<const std::uint8_t> msg, std::span<const std::uint8_t> sig);

// Node id -> public key registry. Verification results are memoised; the cache is internally synchronised.
class Pki {
public:
    void add(NodeId node, PublicKey pk);
    const PublicKey* find(NodeId node) const;
    bool verify(NodeId node, std::span<const std::uint8_t> msg, std::span<const std::uint8_t> sig) const;
    std::size_t size() const { return keys_.size(); }

private:
    std::map<NodeId, PublicKey> keys_;
    mutable std::mutex mutex_;
    mutable std::set<Hash> verified_;
};

} // namespace vtl
