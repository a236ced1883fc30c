#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <vtl/crypto.hpp>
#include <vtl/types.hpp>

namespace vtl {

// ⟨sources, sender, receiver, amount, remainder⟩. The amount belongs to the receiver and the
// remainder to the sender; a node may use the transaction as a source for the share it owns.
struct Transaction {
    // Sorted ascending, no duplicates.
    std::vector<TxId> sources;
    NodeId sender;
    NodeId receiver;
    amount_t amount = 0;
    amount_t remainder = 0;

    Transaction() = default;
    Transaction(std::vector<TxId> srcs, NodeId from, NodeId to, amount_t amt, amount_t rem);

    bool is_genesis_shaped() const { return sources.empty() && sender == receiver; }

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

// Value of `tx` that `owner` may spend: the amount if it is the receiver plus the remainder if it is the sender.
amount_t owned_share(const Transaction& tx, NodeId owner);

// Fixed-width big-endian integers, u64 length prefixes, sorted source sets.
class Encoder {
public:
    Encoder& u8(std::uint8_t v);
    Encoder& u64(std::uint64_t v);
    Encoder& hash(const Hash& h);
    Encoder& raw(std::span<const std::uint8_t> data);
    Encoder& tx_id(const TxId& id);
    Encoder& transaction(const Transaction& tx);

    const bytes& data() const& { return buf_; }
    bytes take() { return std::move(buf_); }

private:
    bytes buf_;
};

class Decoder {
public:
    explicit Decoder(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8();
    std::uint64_t u64();
    Hash hash();
    TxId tx_id();
    Transaction transaction();
    bool done() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const;
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

bytes canonical_encode(const Transaction& tx);

// Immutable. The block hash and per-transaction digests are computed once at construction.
class Block {
public:
    Block(NodeId owner, height_t height, std::optional<Hash> prev_hash, std::vector<Transaction> txs);

    NodeId owner() const { return owner_; }
    height_t height() const { return height_; }
    const std::optional<Hash>& prev_hash() const { return prev_hash_; }
    const std::vector<Transaction>& txs() const { return txs_; }
    const Hash& hash() const { return hash_; }
    const std::vector<Hash>& tx_digests() const { return tx_digests_; }
    std::size_t encoded_size() const { return encoded_size_; }

    // Transaction at 1-based index, or nullptr.
    const Transaction* tx_at(std::uint32_t index) const;

    BlockKey key() const { return { owner_, height_ }; }

private:
    NodeId owner_;
    height_t height_;
    std::optional<Hash> prev_hash_;
    std::vector<Transaction> txs_;
    Hash hash_;
    std::vector<Hash> tx_digests_;
    std::size_t encoded_size_ = 0;
};

using BlockPtr = std::shared_ptr<const Block>;

bytes canonical_encode(const Block& b);
Block decode_block(Decoder& dec);
Hash block_hash(const Block& b);
Hash tx_digest(const Transaction& tx);

struct Abstract {
    NodeId node;
    height_t height = 0;
    Hash block_hash;
    bytes signature;

    friend bool operator==(const Abstract&, const Abstract&) = default;
};

// The signed payload u‖k‖H(B_{u,k}).
bytes abstract_payload(NodeId node, height_t height, const Hash& block_hash);

Abstract make_abstract(const KeyPair& key, const Block& b);
bool verify_abstract(const Abstract& a, const PublicKey& pk);
bool verify_abstract(const Abstract& a, const Pki& pki);

// Genesis: height 1, no previous hash, ⟨∅, owner, owner, 0, initial_value⟩.
Block genesis_block(NodeId owner, amount_t initial_value);

class IndividualChain {
public:
    explicit IndividualChain(NodeId owner) : owner_(owner) {}
    IndividualChain(NodeId owner, amount_t initial_value);

    NodeId owner() const { return owner_; }
    height_t height() const { return blocks_.size(); }
    bool empty() const { return blocks_.empty(); }
    const std::vector<BlockPtr>& blocks() const { return blocks_; }
    // 1-based; nullptr when out of range.
    const Block* at(height_t h) const;
    BlockPtr ptr_at(height_t h) const;

    // Seals `txs` into the next block. Every tx must be sent by the owner and the list must be non-empty.
    const Block& append_block(std::vector<Transaction> txs);
    // Appends a prebuilt block after checking height, owner and linkage.
    void push(BlockPtr b);
    // Replaces the newest block (an unconfirmed tip) with an alternative of the same height.
    void replace_tip(BlockPtr b);
    // Builds (without appending) the block that append_block would create.
    Block next_block(std::vector<Transaction> txs) const;

    bool verify_linkage() const;

private:
    NodeId owner_;
    std::vector<BlockPtr> blocks_;
};

} // namespace vtl
