#include <vtl/ledger.hpp>

#include <algorithm>

namespace vtl {

Transaction::Transaction(std::vector<TxId> srcs, NodeId from, NodeId to, amount_t amt, amount_t rem)
    : sources(std::move(srcs)), sender(from), receiver(to), amount(amt), remainder(rem)
{
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
}

amount_t owned_share(const Transaction& tx, NodeId owner)
{
    amount_t v = 0;
    if (tx.receiver == owner)
        v += tx.amount;
    if (tx.sender == owner)
        v += tx.remainder;
    return v;
}

Encoder& Encoder::u8(std::uint8_t v)
{
    buf_.push_back(v);
    return *this;
}

Encoder& Encoder::u64(std::uint64_t v)
{
    for (int i = 7; i >= 0; --i)
        buf_.push_back(static_cast<std::uint8_t>(v >> (i * 8)));
    return *this;
}

Encoder& Encoder::hash(const Hash& h)
{
    buf_.insert(buf_.end(), h.bytes.begin(), h.bytes.end());
    return *this;
}

Encoder& Encoder::raw(std::span<const std::uint8_t> data)
{
    buf_.insert(buf_.end(), data.begin(), data.end());
    return *this;
}

Encoder& Encoder::tx_id(const TxId& id)
{
    return u64(id.sender.value).u64(id.height).u64(id.index);
}

Encoder& Encoder::transaction(const Transaction& tx)
{
    const auto emit_sources = [this](const std::vector<TxId>& srcs) {
        u64(srcs.size());
        for (const auto& s : srcs)
            tx_id(s);
    };
    if (std::is_sorted(tx.sources.begin(), tx.sources.end())) {
        emit_sources(tx.sources);
    } else {
        auto sorted = tx.sources;
        std::sort(sorted.begin(), sorted.end());
        emit_sources(sorted);
    }
    return u64(tx.sender.value).u64(tx.receiver.value).u64(tx.amount).u64(tx.remainder);
}

void Decoder::need(std::size_t n) const
{
    if (data_.size() - pos_ < n)
        throw error("truncated encoding");
}

std::uint8_t Decoder::u8()
{
    need(1);
    return data_[pos_++];
}

std::uint64_t Decoder::u64()
{
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v = (v << 8) | data_[pos_++];
    return v;
}

Hash Decoder::hash()
{
    need(32);
    Hash h;
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(pos_), 32, h.bytes.begin());
    pos_ += 32;
    return h;
}

TxId Decoder::tx_id()
{
    TxId id;
    id.sender = NodeId { static_cast<std::uint32_t>(u64()) };
    id.height = u64();
    id.index = static_cast<std::uint32_t>(u64());
    return id;
}

Transaction Decoder::transaction()
{
    const auto n = u64();
    // Each source takes 24 bytes; reject absurd counts before allocating.
    if (n > (data_.size() - pos_) / 24)
        throw error("truncated encoding");
    std::vector<TxId> srcs;
    srcs.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i)
        srcs.push_back(tx_id());
    // Sorting leaves the encoding unchanged; duplicates are kept so malformed sets stay detectable.
    std::sort(srcs.begin(), srcs.end());
    Transaction tx;
    tx.sources = std::move(srcs);
    tx.sender = NodeId { static_cast<std::uint32_t>(u64()) };
    tx.receiver = NodeId { static_cast<std::uint32_t>(u64()) };
    tx.amount = u64();
    tx.remainder = u64();
    return tx;
}

bytes canonical_encode(const Transaction& tx)
{
    return Encoder {}.transaction(tx).take();
}

Hash tx_digest(const Transaction& tx)
{
    return sha256(canonical_encode(tx));
}

namespace {
    void encode_block(Encoder& enc, NodeId owner, height_t height, const std::optional<Hash>& prev, const std::vector<Transaction>& txs)
    {
        enc.u64(owner.value).u64(height);
        if (prev) {
            enc.u8(1).hash(*prev);
        } else {
            enc.u8(0);
        }
        enc.u64(txs.size());
        for (const auto& tx : txs)
            enc.transaction(tx);
    }
}

Block::Block(NodeId owner, height_t height, std::optional<Hash> prev_hash, std::vector<Transaction> txs)
    : owner_(owner), height_(height), prev_hash_(std::move(prev_hash)), txs_(std::move(txs))
{
    Encoder enc;
    encode_block(enc, owner_, height_, prev_hash_, txs_);
    encoded_size_ = enc.data().size();
    hash_ = sha256(enc.data());
    tx_digests_.reserve(txs_.size());
    for (const auto& tx : txs_)
        tx_digests_.push_back(tx_digest(tx));
}

const Transaction* Block::tx_at(std::uint32_t index) const
{
    if (index == 0 || index > txs_.size())
        return nullptr;
    return &txs_[index - 1];
}

bytes canonical_encode(const Block& b)
{
    Encoder enc;
    encode_block(enc, b.owner(), b.height(), b.prev_hash(), b.txs());
    return std::move(enc).take();
}

Block decode_block(Decoder& dec)
{
    const NodeId owner { static_cast<std::uint32_t>(dec.u64()) };
    const height_t height = dec.u64();
    std::optional<Hash> prev;
    const auto tag = dec.u8();
    if (tag == 1)
        prev = dec.hash();
    else if (tag != 0)
        throw error("bad previous-hash tag");
    const auto n = dec.u64();
    std::vector<Transaction> txs;
    for (std::uint64_t i = 0; i < n; ++i)
        txs.push_back(dec.transaction());
    return Block { owner, height, std::move(prev), std::move(txs) };
}

Hash block_hash(const Block& b)
{
    return b.hash();
}

bytes abstract_payload(NodeId node, height_t height, const Hash& block_hash)
{
    return Encoder {}.u64(node.value).u64(height).hash(block_hash).take();
}

Abstract make_abstract(const KeyPair& key, const Block& b)
{
    if (key.node() != b.owner())
        throw error("abstract signer " + to_string(key.node()) + " does not own block " + to_string(b.key()));
    Abstract a;
    a.node = b.owner();
    a.height = b.height();
    a.block_hash = b.hash();
    a.signature = key.sign(abstract_payload(a.node, a.height, a.block_hash));
    return a;
}

bool verify_abstract(const Abstract& a, const PublicKey& pk)
{
    return verify_signature(pk, abstract_payload(a.node, a.height, a.block_hash), a.signature);
}

bool verify_abstract(const Abstract& a, const Pki& pki)
{
    return pki.verify(a.node, abstract_payload(a.node, a.height, a.block_hash), a.signature);
}

Block genesis_block(NodeId owner, amount_t initial_value)
{
    if (initial_value == 0)
        throw error("genesis value must be positive");
    return Block { owner, 1, std::nullopt, { Transaction { {}, owner, owner, 0, initial_value } } };
}

IndividualChain::IndividualChain(NodeId owner, amount_t initial_value) : owner_(owner)
{
    blocks_.push_back(std::make_shared<const Block>(genesis_block(owner, initial_value)));
}

const Block* IndividualChain::at(height_t h) const
{
    if (h == 0 || h > blocks_.size())
        return nullptr;
    return blocks_[h - 1].get();
}

BlockPtr IndividualChain::ptr_at(height_t h) const
{
    if (h == 0 || h > blocks_.size())
        return nullptr;
    return blocks_[h - 1];
}

Block IndividualChain::next_block(std::vector<Transaction> txs) const
{
    if (txs.empty())
        throw error("cannot append an empty block");
    for (const auto& tx : txs) {
        if (tx.sender != owner_)
            throw error("transaction sender " + to_string(tx.sender) + " is not chain owner " + to_string(owner_));
    }
    if (blocks_.empty())
        throw error("chain has no genesis block");
    return Block { owner_, height() + 1, blocks_.back()->hash(), std::move(txs) };
}

const Block& IndividualChain::append_block(std::vector<Transaction> txs)
{
    blocks_.push_back(std::make_shared<const Block>(next_block(std::move(txs))));
    return *blocks_.back();
}

void IndividualChain::push(BlockPtr b)
{
    if (b->owner() != owner_ || b->height() != height() + 1)
        throw error("block " + to_string(b->key()) + " does not extend chain of " + to_string(owner_));
    if (!blocks_.empty() && b->prev_hash() != blocks_.back()->hash())
        throw error("block " + to_string(b->key()) + " does not link to its predecessor");
    blocks_.push_back(std::move(b));
}

void IndividualChain::replace_tip(BlockPtr b)
{
    if (blocks_.empty() || b->height() != height() || b->owner() != owner_)
        throw error("replacement does not match chain tip");
    const auto prev = blocks_.size() >= 2 ? std::optional<Hash> { blocks_[blocks_.size() - 2]->hash() } : std::nullopt;
    if (b->prev_hash() != prev)
        throw error("replacement tip does not link to its predecessor");
    blocks_.back() = std::move(b);
}

bool IndividualChain::verify_linkage() const
{
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const auto& b = *blocks_[i];
        if (b.owner() != owner_ || b.height() != i + 1)
            return false;
        if (i == 0 ? b.prev_hash().has_value() : b.prev_hash() != blocks_[i - 1]->hash())
            return false;
    }
    return true;
}

} // namespace vtl
