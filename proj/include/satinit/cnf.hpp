#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace satinit {

/// A literal: 1-based variable index plus polarity.
struct Literal {
    std::uint32_t var = 0;
    bool negative = false;

    static Literal from_dimacs(long value) {
        return value < 0 ? Literal{static_cast<std::uint32_t>(-value), true}
                         : Literal{static_cast<std::uint32_t>(value), false};
    }
    long to_dimacs() const { return negative ? -static_cast<long>(var) : static_cast<long>(var); }
    Literal operator~() const { return {var, !negative}; }
    bool positive() const { return !negative; }

    friend bool operator==(const Literal&, const Literal&) = default;
};

using Clause = std::vector<Literal>;

/// Conjunctive normal form. Clauses are kept in stored order; that order is
/// observable (activity computation and solver search both depend on it).
struct Cnf {
    std::uint32_t num_vars = 0;
    std::vector<Clause> clauses;

    std::size_t num_clauses() const { return clauses.size(); }
    std::size_t num_literals() const;

    friend bool operator==(const Cnf&, const Cnf&) = default;
};

/// Per-variable literal occurrence counts, indexed by var - 1.
struct VarStats {
    std::vector<std::uint32_t> negative;  // xn
    std::vector<std::uint32_t> positive;  // xp

    std::uint32_t xn(std::uint32_t var) const { return negative[var - 1]; }
    std::uint32_t xp(std::uint32_t var) const { return positive[var - 1]; }
    std::uint32_t xc(std::uint32_t var) const { return xn(var) + xp(var); }
    std::size_t num_vars() const { return positive.size(); }

    friend bool operator==(const VarStats&, const VarStats&) = default;
};

class DimacsError : public std::runtime_error {
public:
    DimacsError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct ParsedDimacs {
    Cnf cnf;
    std::size_t declared_clauses = 0;
    std::size_t tautologies_dropped = 0;
    std::size_t duplicate_literals_removed = 0;
    std::vector<std::string> warnings;
};

/// Parses DIMACS CNF. LF or CRLF line endings; `c` comment lines; a line
/// starting with `%` ends the clause section (SATLIB convention). Duplicate
/// literals are merged and tautological clauses dropped. A clause-count
/// mismatch against the header is reported as a warning.
/// Throws DimacsError naming the offending line.
ParsedDimacs parse_dimacs(std::string_view text);
ParsedDimacs read_dimacs_file(const std::string& path);

/// Serializes with LF line endings and the header reflecting the actual clause count.
std::string write_dimacs(const Cnf& cnf, std::string_view comment = {});

VarStats compute_var_stats(const Cnf& cnf);

enum class BcpVerdict { reduced, satisfied, unsatisfiable };
const char* to_string(BcpVerdict v);

struct BcpResult {
    Cnf cnf;                      // surviving clauses in original order, false literals stripped
    BcpVerdict verdict = BcpVerdict::reduced;
    std::vector<Literal> forced;  // in propagation order
};

/// Top-level unit propagation to fixpoint. An unsatisfiable result carries a
/// single empty clause; a satisfied result carries no clauses. num_vars is
/// preserved so variable indices stay stable.
BcpResult preprocess_bcp(const Cnf& cnf);

/// Variable renaming/inversion plus clause permutation produced by reorder().
struct ReorderMapping {
    std::vector<std::uint32_t> var_to_new;   // [old var - 1] -> new var (1-based)
    std::vector<bool> inverted;              // [old var - 1]
    std::vector<std::size_t> clause_to_new;  // [old clause index] -> new clause index

    static ReorderMapping identity(const Cnf& cnf);

    Literal map(Literal old_lit) const {
        return {var_to_new[old_lit.var - 1], old_lit.negative != static_cast<bool>(inverted[old_lit.var - 1])};
    }

    /// Sidecar text: `v <old> <new> <inv>` then `c <old_idx> <new_idx>` (0-based clauses).
    std::string serialize() const;
    static ReorderMapping parse(std::string_view text);

    friend bool operator==(const ReorderMapping&, const ReorderMapping&) = default;
};

struct Reordered {
    Cnf cnf;
    ReorderMapping mapping;
};

/// Applies a mapping: clause i of the input lands at mapping.clause_to_new[i].
Cnf apply_mapping(const Cnf& cnf, const ReorderMapping& mapping);

/// Inverse of apply_mapping: recovers the original CNF exactly.
Cnf unapply_mapping(const Cnf& reordered, const ReorderMapping& mapping);

/// Seeded satisfiability-preserving shuffle: permutes clause order, renames
/// variables, and inverts each variable with probability 1/2. Deterministic
/// in (cnf, seed). Draw order: variable permutation, inversion bits, clause
/// permutation, all from one SplitMix64 stream.
Reordered reorder(const Cnf& cnf, std::uint64_t seed);

/// A model is indexed by var - 1; true means the variable is assigned true.
using Model = std::vector<bool>;

/// Translates a model of the reordered CNF back to the original variables.
Model map_model_back(const Model& reordered_model, const ReorderMapping& mapping);

bool satisfies(const Cnf& cnf, const Model& model);

}  // namespace satinit
