#include <vtl/validation.hpp>

namespace vtl {

std::string_view to_string(reason r)
{
    switch (r) {
    case reason::none: return "none";
    case reason::target_missing: return "target-missing";
    case reason::sender_mismatch: return "sender-mismatch";
    case reason::chain_gap: return "chain-gap";
    case reason::bad_linkage: return "bad-linkage";
    case reason::abstract_mismatch: return "abstract-mismatch";
    case reason::bad_signature: return "bad-signature";
    case reason::unconfirmed: return "unconfirmed";
    case reason::duplicate_target: return "duplicate-target";
    case reason::source_proof: return "source-proof";
    case reason::cycle: return "cycle";
    case reason::target_mismatch: return "target-mismatch";
    case reason::malformed_sources: return "malformed-sources";
    case reason::genesis_shape: return "genesis-shape";
    case reason::source_missing: return "source-missing";
    case reason::ownership: return "ownership";
    case reason::equality: return "equality";
    case reason::double_spend: return "double-spend";
    case reason::source_invalid: return "source-invalid";
    }
    return "?";
}

std::string_view to_string(verdict v)
{
    return v == verdict::valid ? "valid" : "unknown";
}

std::string_view to_string(proof_verdict v)
{
    return v == proof_verdict::pass ? "pass" : "fail";
}

ProofCheck verify_proof(const ProofBundle& p, const MainChain& log, const Pki& pki)
{
    const BundleView view { p };
    Validator v { view, log, pki };
    return v.verify(p.target);
}

Validation validate(const Transaction& tx, const ProofBundle& p, const MainChain& log, const Pki& pki)
{
    const BundleView view { p };
    Validator v { view, log, pki };
    return v.validate(p.target, tx);
}

} // namespace vtl
