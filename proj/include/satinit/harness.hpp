#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "satinit/cnf.hpp"
#include "satinit/program.hpp"
#include "satinit/solver.hpp"

namespace satinit {

class HarnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

/// Rounds half away from zero to an integer percent of `baseline`.
long percent_of(std::uint64_t value, std::uint64_t baseline);

struct BaselineRecord {
    std::string problem;
    std::uint64_t kappa0 = 0;
    std::uint64_t decisions = 0;
    double wall_time = 0.0;
    std::string config_hash;
};

struct SampleRecord {
    std::size_t id = 0;
    std::uint64_t seed = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t decisions = 0;
    long percent = 0;
    double wall_time = 0.0;
};

struct HistogramOptions {
    std::size_t samples = 1000;
    double lo = 0.0;
    double hi = 1.0;
    std::uint64_t master_seed = 1;
    std::size_t jobs = 1;
};

struct HistogramReport {
    std::string problem;
    HistogramOptions options;
    SolverConfig solver;
    BaselineRecord baseline;
    std::map<long, std::size_t> bins;  // rounded percent of kappa0 -> count
    std::vector<SampleRecord> samples;  // ordered by id
    std::size_t best_sample = 0;        // fewest conflicts, lowest id on ties
    std::size_t worst_sample = 0;       // most conflicts, lowest id on ties

    std::string config_hash() const;
    std::string histogram_csv() const;  // percent,count
    std::string samples_csv() const;    // sample_id,seed,conflicts,decisions,percent
};

/// Initial activities for one histogram sample: one uniform draw in [lo, hi]
/// per variable from SplitMix64(seed).
ActivityVector random_activities(std::uint32_t num_vars, double lo, double hi, std::uint64_t seed);

/// Solves `cnf` under zero init (kappa0) and under `samples` random
/// initializations. Sample i uses seed derive_seed(master_seed, i). `cnf`
/// should already be preprocessed. Throws HarnessError when kappa0 is 0.
HistogramReport run_histogram(const Cnf& cnf, const HistogramOptions& options, const SolverConfig& solver,
                              std::string problem = "problem");

/// Re-solves one sample from its seed.
SolveOutcome replay_sample(const Cnf& cnf, std::uint64_t seed, double lo, double hi, const SolverConfig& solver);

struct ReorderComparison {
    HistogramReport original;
    HistogramReport reordered;
    std::optional<std::uint64_t> reorder_seed;  // nullopt: identity mapping
    double kappa0_ratio = 0.0;                  // reordered / original
    bool verdicts_agree = false;
};

/// Histograms of a CNF and of its reordering. Passing std::nullopt as the
/// seed uses the identity mapping.
ReorderComparison compare_reordered(const Cnf& cnf, std::optional<std::uint64_t> reorder_seed,
                                    const HistogramOptions& options, const SolverConfig& solver,
                                    const std::string& problem = "problem");

struct ValidationProblem {
    std::string name;
    Cnf cnf;  // raw; preprocessed inside run_validation
};

struct ValidationRow {
    std::string problem;
    std::string preprocess;  // BcpVerdict name
    Verdict verdict = Verdict::sat;
    std::uint64_t baseline_conflicts = 0;
    std::uint64_t program_conflicts = 0;
    std::uint64_t baseline_decisions = 0;
    std::uint64_t program_decisions = 0;
    double baseline_time = 0.0;
    double program_time = 0.0;
    double percent = 100.0;  // program conflicts as percent of baseline
};

struct ValidationReport {
    std::string program;
    bool normalized = true;
    SolverConfig solver;
    std::vector<ValidationRow> rows;
    double mean_percent = 100.0;   // mean of per-problem percents with a finite value
    double total_percent = 100.0;  // 100 * sum(program) / sum(baseline)

    std::string config_hash() const;
    std::string csv(std::uint64_t master_seed = 0) const;
};

/// Solves every problem with zero init and with the program's (optionally
/// normalized) activities. A problem with zero baseline conflicts reports
/// 100% when the program also needs none, +inf otherwise.
ValidationReport run_validation(const InitProgram& program, const std::vector<ValidationProblem>& problems,
                                const SolverConfig& solver, bool normalize_acts = true);

/// Desk-scale instance generator: uniform random k-SAT, no repeated variable within a clause.
Cnf random_ksat(std::uint32_t num_vars, std::size_t num_clauses, std::uint32_t k, std::uint64_t seed);

}  // namespace satinit
