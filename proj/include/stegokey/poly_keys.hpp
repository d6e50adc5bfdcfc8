#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "stegokey/hierarchy.hpp"

namespace stegokey {

/// The symmetric polynomial P(x1..xm) = sum a_{i1..im} x1^i1...xm^im (mod p).
/// Coefficients are produced by a keyed PRF over the *sorted* exponent tuple,
/// which makes P permutation-symmetric by construction; the epoch is mixed in
/// so every rekey re-randomizes the whole coefficient table.
struct Scheme {
    std::vector<std::uint8_t> master_secret; // raw seed bytes
    std::uint32_t t = 2;                     // degree bound per variable
    std::uint32_t m = 1;                     // variable count
    std::uint64_t p = 2147483647ULL;         // modulus, prime by default
    std::uint64_t epoch = 0;
    DummyParams dummies;

    std::array<std::uint8_t, 32> prf_key() const;
};

struct ClassKey {
    std::uint64_t value = 0;
    ClassId cls = 0;
    std::uint64_t epoch = 0;
};

struct UserKey {
    std::uint64_t value = 0;
    ClassId cls = 0;
    UserId user_id = 0;
};

/// Coefficient a_{i1..im} for one exponent tuple. Invariant under any
/// permutation of the tuple.
std::uint64_t coefficient(const Scheme& scheme, std::span<const std::uint32_t> index_tuple);

/// Evaluates P at `params` (length m, entries reduced mod p).
std::uint64_t eval_P(const Scheme& scheme, std::span<const std::uint64_t> params);

/// A class computes its own key: P over key_params(h, c).
ClassKey compute_class_key(const Scheme& scheme, const Hierarchy& h, ClassId c);

/// An ancestor derives a descendant's key: P over derivation_params(...).
/// Equals compute_class_key(descendant) exactly, or throws NotAncestor.
ClassKey derive_descendant_key(const Scheme& scheme, const Hierarchy& h,
                               ClassId ancestor, ClassId descendant);

/// Private key for intra-class messaging: key + floor(key / user_id),
/// plain integer arithmetic with no modulus.
std::uint64_t user_key_value(std::uint64_t class_key, UserId user_id);
UserKey compute_user_key(const ClassKey& class_key, UserId user_id);

} // namespace stegokey
