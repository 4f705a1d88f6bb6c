#pragma once

// Test-only reference implementations. Nothing here calls into the solver or
// the interpreter; they are independent checks of those code paths.

#include <cstdint>
#include <optional>
#include <vector>

#include "satinit/cnf.hpp"

namespace oracle {

// Truth-table satisfiability over all 2^n assignments, 64 at a time.
// Variables 1..6 are spread across bit lanes, the rest enumerate words.
inline std::optional<satinit::Model> brute_force_sat(const satinit::Cnf& cnf) {
    const std::uint32_t n = cnf.num_vars;
    if (n > 26) return std::nullopt;  // caller must keep instances small
    static constexpr std::uint64_t lane[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                              0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
    const std::uint32_t low = n < 6 ? n : 6;
    const std::uint64_t words = n > 6 ? (std::uint64_t{1} << (n - 6)) : 1;
    const std::uint64_t valid = low == 6 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (std::uint64_t{1} << low)) - 1);
    std::vector<std::uint64_t> value(n + 1);
    for (std::uint64_t w = 0; w < words; ++w) {
        for (std::uint32_t v = 1; v <= n; ++v) {
            if (v <= 6)
                value[v] = lane[v - 1];
            else
                value[v] = ((w >> (v - 7)) & 1) ? ~std::uint64_t{0} : 0;
        }
        std::uint64_t all = valid;
        for (const auto& clause : cnf.clauses) {
            std::uint64_t c = 0;
            for (const auto& lit : clause) c |= lit.negative ? ~value[lit.var] : value[lit.var];
            all &= c;
            if (!all) break;
        }
        if (all) {
            const int bit = __builtin_ctzll(all);
            satinit::Model m(n);
            for (std::uint32_t v = 1; v <= n; ++v) m[v - 1] = (value[v] >> bit) & 1;
            return m;
        }
    }
    return std::nullopt;
}

inline bool is_sat(const satinit::Cnf& cnf) { return brute_force_sat(cnf).has_value(); }

struct NaiveStats {
    std::vector<std::uint32_t> xn, xp;
};

inline NaiveStats recount(const satinit::Cnf& cnf) {
    NaiveStats s;
    for (std::uint32_t v = 1; v <= cnf.num_vars; ++v) {
        std::uint32_t n = 0, p = 0;
        for (const auto& clause : cnf.clauses)
            for (const auto& lit : clause)
                if (lit.var == v) (lit.negative ? n : p) += 1;
        s.xn.push_back(n);
        s.xp.push_back(p);
    }
    return s;
}

}  // namespace oracle
