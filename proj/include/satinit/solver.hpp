#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "satinit/cnf.hpp"

namespace satinit {

using ActivityVector = std::vector<double>;

/// How the first activity bump relates to the caller's initial activities.
enum class IncrementMode {
    // First bump equals max|init| (1 when init is all zero). Positive scaling
    // of the init leaves the search trace unchanged.
    init_relative,
    // First bump is 1 regardless of init, as in MiniSAT.
    unit,
};

struct SolverConfig {
    double var_decay = 0.95;
    double clause_decay = 0.999;
    double random_decision_freq = 0.02;
    double rescale_threshold = 1e100;
    std::uint64_t restart_first = 100;
    double restart_factor = 1.5;
    double learnt_db_initial_fraction = 1.0 / 3.0;
    double learnt_db_growth = 1.1;
    IncrementMode increment_mode = IncrementMode::init_relative;
    std::uint64_t rng_seed = 91648253;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
    /// Canonical one-line text of every field; input to config hashes.
    std::string canonical() const;
};

enum class Verdict { sat, unsat };
const char* to_string(Verdict v);

struct SolveOutcome {
    Verdict verdict = Verdict::unsat;
    std::uint64_t conflicts = 0;
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
    std::uint64_t restarts = 0;
    Model model;  // non-empty iff sat
    double wall_time = 0.0;

    bool same_search(const SolveOutcome& o) const {
        return verdict == o.verdict && conflicts == o.conflicts && decisions == o.decisions &&
               propagations == o.propagations && model == o.model;
    }
};

class SolverError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Complete CDCL search with activity-based decisions seeded by `init`.
/// Decisions pick, with probability random_decision_freq, a uniformly random
/// unassigned variable, otherwise the unassigned variable of highest activity
/// (ties by a seeded random priority). Decision polarity is always false.
/// Throws SolverError if init.size() != num_vars or init holds a non-finite value.
SolveOutcome solve(const Cnf& cnf, std::span<const double> init, const SolverConfig& config);

/// solve() with the all-zero initialization; its conflict count is the baseline.
SolveOutcome solve_with_baseline(const Cnf& cnf, const SolverConfig& config);

std::string format_model(const Model& model);

}  // namespace satinit
