#include "stegokey/poly_keys.hpp"

#include <algorithm>

#include "stegokey/prf.hpp"

namespace stegokey {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % p);
}

} // namespace

std::array<std::uint8_t, 32> Scheme::prf_key() const {
    return prf::digest32(master_secret);
}

std::uint64_t coefficient(const Scheme& scheme, std::span<const std::uint32_t> index_tuple) {
    if (index_tuple.size() != scheme.m) {
        throw Error(ErrorCode::WrongArity,
                    "index tuple has " + std::to_string(index_tuple.size()) +
                        " entries, scheme m=" + std::to_string(scheme.m));
    }
    std::vector<std::uint32_t> sorted(index_tuple.begin(), index_tuple.end());
    std::sort(sorted.begin(), sorted.end());
    if (!sorted.empty() && sorted.back() > scheme.t) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "exponent " + std::to_string(sorted.back()) + " exceeds t=" +
                        std::to_string(scheme.t));
    }
    std::vector<std::uint8_t> msg;
    msg.reserve(12 + 4 * sorted.size());
    prf::append_tag(msg, "coef");
    prf::append_u64(msg, scheme.epoch);
    for (auto i : sorted) prf::append_u32(msg, i);
    return prf::keyed64(scheme.prf_key(), msg) % scheme.p;
}

std::uint64_t eval_P(const Scheme& scheme, std::span<const std::uint64_t> params) {
    if (params.size() != scheme.m) {
        throw Error(ErrorCode::WrongArity,
                    "expected " + std::to_string(scheme.m) + " parameters, got " +
                        std::to_string(params.size()));
    }
    const std::uint64_t p = scheme.p;
    const std::uint32_t t = scheme.t;
    const std::uint32_t m = scheme.m;

    // powers[k][e] = params[k]^e mod p
    std::vector<std::vector<std::uint64_t>> powers(m, std::vector<std::uint64_t>(t + 1, 1));
    for (std::uint32_t k = 0; k < m; ++k) {
        const std::uint64_t x = params[k] % p;
        for (std::uint32_t e = 1; e <= t; ++e) {
            powers[k][e] = mulmod(powers[k][e - 1], x, p);
        }
    }

    const auto key = scheme.prf_key();
    std::vector<std::uint8_t> msg;
    std::vector<std::uint32_t> tuple(m, 0);
    std::vector<std::uint32_t> sorted(m);
    std::uint64_t acc = 0;
    for (;;) {
        sorted.assign(tuple.begin(), tuple.end());
        std::sort(sorted.begin(), sorted.end());
        msg.clear();
        prf::append_tag(msg, "coef");
        prf::append_u64(msg, scheme.epoch);
        for (auto i : sorted) prf::append_u32(msg, i);
        std::uint64_t term = prf::keyed64(key, msg) % p;
        for (std::uint32_t k = 0; k < m; ++k) {
            term = mulmod(term, powers[k][tuple[k]], p);
        }
        acc = (acc + term) % p;

        // odometer over all (t+1)^m exponent tuples
        std::uint32_t k = 0;
        while (k < m && tuple[k] == t) tuple[k++] = 0;
        if (k == m) break;
        ++tuple[k];
    }
    return acc;
}

ClassKey compute_class_key(const Scheme& scheme, const Hierarchy& h, ClassId c) {
    const auto params = key_params(h, c, scheme.m, scheme.dummies);
    return ClassKey{eval_P(scheme, params), c, scheme.epoch};
}

ClassKey derive_descendant_key(const Scheme& scheme, const Hierarchy& h,
                               ClassId ancestor, ClassId descendant) {
    const auto params = derivation_params(h, ancestor, descendant, scheme.m, scheme.dummies);
    return ClassKey{eval_P(scheme, params), descendant, scheme.epoch};
}

std::uint64_t user_key_value(std::uint64_t class_key, UserId user_id) {
    if (user_id == 0) {
        throw Error(ErrorCode::ZeroUserId, "user id must be positive");
    }
    return class_key + class_key / user_id;
}

UserKey compute_user_key(const ClassKey& class_key, UserId user_id) {
    return UserKey{user_key_value(class_key.value, user_id), class_key.cls, user_id};
}

} // namespace stegokey
