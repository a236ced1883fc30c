#include <vtl/crypto.hpp>

#include <cstring>

#include <sodium.h>

namespace vtl {

namespace {
    void ensure_sodium()
    {
        static const int rc = sodium_init();
        if (rc < 0)
            throw error("libsodium initialisation failed");
    }

    constexpr std::size_t test_key_size = 32;
    constexpr std::size_t test_sig_size = 32;
}

std::string to_hex(std::span<const std::uint8_t> data)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

bytes from_hex(std::string_view hex)
{
    const auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        if (c >= 'A' && c <= 'F')
            return c - 'A' + 10;
        throw error(std::string("invalid hex digit: ") + c);
    };
    if (hex.size() % 2 != 0)
        throw error("odd-length hex string");
    bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2)
        out.push_back(static_cast<std::uint8_t>(nibble(hex[i]) << 4 | nibble(hex[i + 1])));
    return out;
}

Hash hash_from_hex(std::string_view hex)
{
    const auto raw = from_hex(hex);
    if (raw.size() != 32)
        throw error("hash must be 32 bytes");
    Hash h;
    std::copy(raw.begin(), raw.end(), h.bytes.begin());
    return h;
}

std::string Hash::hex() const
{
    return to_hex(bytes);
}

std::string to_string(NodeId n) { return std::to_string(n.value); }

std::string to_string(const TxId& id)
{
    return "(" + std::to_string(id.sender.value) + "," + std::to_string(id.height) + "," + std::to_string(id.index) + ")";
}

std::string to_string(const BlockKey& k)
{
    return "(" + std::to_string(k.owner.value) + "," + std::to_string(k.height) + ")";
}

Hash sha256(std::span<const std::uint8_t> data)
{
    ensure_sodium();
    Hash h;
    crypto_hash_sha256(h.bytes.data(), data.data(), data.size());
    return h;
}

std::string_view hash_name() { return "sha256"; }

std::string_view to_string(sig_scheme s)
{
    switch (s) {
    case sig_scheme::ed25519:
        return "ed25519";
    case sig_scheme::test_keyed:
        return "test";
    }
    return "unknown";
}

sig_scheme parse_sig_scheme(std::string_view s)
{
    if (s == "ed25519")
        return sig_scheme::ed25519;
    if (s == "test")
        return sig_scheme::test_keyed;
    throw error("unknown signature scheme: " + std::string(s));
}

KeyPair KeyPair::derive(NodeId node, std::uint64_t seed, sig_scheme scheme)
{
    ensure_sodium();
    bytes material;
    for (int i = 7; i >= 0; --i)
        material.push_back(static_cast<std::uint8_t>(seed >> (i * 8)));
    for (int i = 3; i >= 0; --i)
        material.push_back(static_cast<std::uint8_t>(node.value >> (i * 8)));
    material.push_back(static_cast<std::uint8_t>(scheme));
    const Hash key_seed = sha256(material);

    KeyPair kp;
    kp.node_ = node;
    kp.public_.scheme = scheme;
    switch (scheme) {
    case sig_scheme::ed25519:
        kp.secret_.resize(crypto_sign_SECRETKEYBYTES);
        kp.public_.key.resize(crypto_sign_PUBLICKEYBYTES);
        crypto_sign_seed_keypair(kp.public_.key.data(), kp.secret_.data(), key_seed.bytes.data());
        break;
    case sig_scheme::test_keyed:
        kp.secret_.assign(key_seed.bytes.begin(), key_seed.bytes.begin() + test_key_size);
        kp.public_.key = kp.secret_;
        break;
    }
    return kp;
}

bytes KeyPair::sign(std::span<const std::uint8_t> msg) const
{
    bytes sig;
    switch (public_.scheme) {
    case sig_scheme::ed25519:
        sig.resize(crypto_sign_BYTES);
        crypto_sign_detached(sig.data(), nullptr, msg.data(), msg.size(), secret_.data());
        break;
    case sig_scheme::test_keyed:
        sig.resize(test_sig_size);
        crypto_generichash(sig.data(), sig.size(), msg.data(), msg.size(), secret_.data(), secret_.size());
        break;
    }
    return sig;
}

bool verify_signature(const PublicKey& pk, std::span<const std::uint8_t> msg, std::span<const std::uint8_t> sig)
{
    ensure_sodium();
    switch (pk.scheme) {
    case sig_scheme::ed25519:
        if (pk.key.size() != crypto_sign_PUBLICKEYBYTES || sig.size() != crypto_sign_BYTES)
            return false;
        return crypto_sign_verify_detached(sig.data(), msg.data(), msg.size(), pk.key.data()) == 0;
    case sig_scheme::test_keyed: {
        if (pk.key.size() != test_key_size || sig.size() != test_sig_size)
            return false;
        std::array<std::uint8_t, test_sig_size> expect {};
        crypto_generichash(expect.data(), expect.size(), msg.data(), msg.size(), pk.key.data(), pk.key.size());
        return sodium_memcmp(expect.data(), sig.data(), expect.size()) == 0;
    }
    }
    return false;
}

void Pki::add(NodeId node, PublicKey pk)
{
    std::scoped_lock lk { mutex_ };
    keys_[node] = std::move(pk);
    verified_.clear();
}

const PublicKey* Pki::find(NodeId node) const
{
    auto it = keys_.find(node);
    return it == keys_.end() ? nullptr : &it->second;
}

bool Pki::verify(NodeId node, std::span<const std::uint8_t> msg, std::span<const std::uint8_t> sig) const
{
    const auto* pk = find(node);
    if (pk == nullptr)
        return false;
    // Memo key binds node, message and signature.
    bytes key_material;
    key_material.reserve(4 + msg.size() + sig.size());
    for (int i = 3; i >= 0; --i)
        key_material.push_back(static_cast<std::uint8_t>(node.value >> (i * 8)));
    key_material.insert(key_material.end(), msg.begin(), msg.end());
    key_material.insert(key_material.end(), sig.begin(), sig.end());
    const Hash memo = sha256(key_material);
    {
        std::scoped_lock lk { mutex_ };
        if (verified_.contains(memo))
            return true;
    }
    if (!verify_signature(*pk, msg, sig))
        return false;
    std::scoped_lock lk { mutex_ };
    verified_.insert(memo);
    return true;
}

} // namespace vtl
