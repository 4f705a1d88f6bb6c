#include "satinit/harness.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <thread>

#include "satinit/activity.hpp"
#include "satinit/rng.hpp"

namespace satinit {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

long percent_of(std::uint64_t value, std::uint64_t baseline) {
    return std::lround(100.0 * static_cast<double>(value) / static_cast<double>(baseline));
}

namespace {

std::string double_text(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_header(const std::string& config_hash, std::uint64_t master_seed) {
    return "# config-hash=" + config_hash + " master-seed=" + std::to_string(master_seed) + '\n';
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < jobs; ++t) {
        workers.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += jobs) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

ActivityVector random_activities(std::uint32_t num_vars, double lo, double hi, std::uint64_t seed) {
    SplitMix64 rng(seed);
    ActivityVector acts(num_vars);
    for (auto& a : acts) a = rng.uniform(lo, hi);
    return acts;
}

SolveOutcome replay_sample(const Cnf& cnf, std::uint64_t seed, double lo, double hi, const SolverConfig& solver) {
    return solve(cnf, random_activities(cnf.num_vars, lo, hi, seed), solver);
}

std::string HistogramReport::config_hash() const {
    const std::string text = solver.canonical() + ";samples=" + std::to_string(options.samples) +
                             ";lo=" + double_text(options.lo) + ";hi=" + double_text(options.hi) +
                             ";master_seed=" + std::to_string(options.master_seed);
    return hex64(fnv1a64(text));
}

std::string HistogramReport::histogram_csv() const {
    std::string out = csv_header(config_hash(), options.master_seed);
    out += "percent,count\n";
    for (const auto& [pct, count] : bins) out += std::to_string(pct) + ',' + std::to_string(count) + '\n';
    return out;
}

std::string HistogramReport::samples_csv() const {
    std::string out = csv_header(config_hash(), options.master_seed);
    out += "sample_id,seed,conflicts,decisions,percent\n";
    for (const auto& s : samples) {
        out += std::to_string(s.id) + ',' + std::to_string(s.seed) + ',' + std::to_string(s.conflicts) + ',' +
               std::to_string(s.decisions) + ',' + std::to_string(s.percent) + '\n';
    }
    return out;
}

HistogramReport run_histogram(const Cnf& cnf, const HistogramOptions& options, const SolverConfig& solver,
                              std::string problem) {
    if (options.samples < 1) throw HarnessError("samples must be >= 1");
    if (!(options.lo <= options.hi) || !std::isfinite(options.lo) || !std::isfinite(options.hi))
        throw HarnessError("random range must satisfy lo <= hi");

    HistogramReport report;
    report.problem = std::move(problem);
    report.options = options;
    report.solver = solver;

    const SolveOutcome base = solve_with_baseline(cnf, solver);
    if (base.conflicts == 0) throw HarnessError("baseline has no conflicts; histogram undefined");
    report.baseline = {report.problem, base.conflicts, base.decisions, base.wall_time, report.config_hash()};

    report.samples.resize(options.samples);
    parallel_for(options.samples, options.jobs, [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(options.master_seed, i);
        const SolveOutcome out = replay_sample(cnf, seed, options.lo, options.hi, solver);
        report.samples[i] = {i, seed, out.conflicts, out.decisions, percent_of(out.conflicts, base.conflicts),
                             out.wall_time};
    });

    for (const auto& s : report.samples) {
        ++report.bins[s.percent];
        if (s.conflicts < report.samples[report.best_sample].conflicts) report.best_sample = s.id;
        if (s.conflicts > report.samples[report.worst_sample].conflicts) report.worst_sample = s.id;
    }
    return report;
}

ReorderComparison compare_reordered(const Cnf& cnf, std::optional<std::uint64_t> reorder_seed,
                                    const HistogramOptions& options, const SolverConfig& solver,
                                    const std::string& problem) {
    ReorderComparison cmp;
    cmp.reorder_seed = reorder_seed;
    const Cnf shuffled = reorder_seed ? reorder(cnf, *reorder_seed).cnf : apply_mapping(cnf, ReorderMapping::identity(cnf));
    cmp.original = run_histogram(cnf, options, solver, problem);
    cmp.reordered = run_histogram(shuffled, options, solver, problem + ".reordered");
    cmp.kappa0_ratio =
        static_cast<double>(cmp.reordered.baseline.kappa0) / static_cast<double>(cmp.original.baseline.kappa0);
    const Verdict a = solve_with_baseline(cnf, solver).verdict;
    const Verdict b = solve_with_baseline(shuffled, solver).verdict;
    cmp.verdicts_agree = a == b;
    return cmp;
}

std::string ValidationReport::config_hash() const {
    return hex64(fnv1a64(solver.canonical() + ";normalize=" + (normalized ? "1" : "0") + ";program=" + program));
}

std::string ValidationReport::csv(std::uint64_t master_seed) const {
    std::string out = csv_header(config_hash(), master_seed);
    out += "problem,baseline_conflicts,program_conflicts,percent,decisions_pair,time_pair\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.2f", r.percent);
        out += r.problem + ',' + std::to_string(r.baseline_conflicts) + ',' + std::to_string(r.program_conflicts) +
               ',' + buf + ',' + std::to_string(r.baseline_decisions) + ':' + std::to_string(r.program_decisions) +
               ',';
        std::snprintf(buf, sizeof buf, "%.6f:%.6f", r.baseline_time, r.program_time);
        out += buf;
        out += '\n';
    }
    return out;
}

ValidationReport run_validation(const InitProgram& program, const std::vector<ValidationProblem>& problems,
                                const SolverConfig& solver, bool normalize_acts) {
    ValidationReport report;
    report.program = print_program(program);
    report.normalized = normalize_acts;
    report.solver = solver;

    double percent_sum = 0.0;
    std::size_t percent_count = 0;
    std::uint64_t base_total = 0, prog_total = 0;
    for (const auto& p : problems) {
        ValidationRow row;
        row.problem = p.name;
        const BcpResult pre = preprocess_bcp(p.cnf);
        row.preprocess = to_string(pre.verdict);
        if (pre.verdict == BcpVerdict::reduced) {
            const VarStats stats = compute_var_stats(pre.cnf);
            ActivityVector acts = compute_activities(program, pre.cnf, stats);
            if (normalize_acts) acts = normalize(acts);
            const SolveOutcome base = solve_with_baseline(pre.cnf, solver);
            const SolveOutcome prog = solve(pre.cnf, acts, solver);
            if (base.verdict != prog.verdict) throw std::logic_error("verdict changed with initialization on " + p.name);
            row.verdict = base.verdict;
            row.baseline_conflicts = base.conflicts;
            row.program_conflicts = prog.conflicts;
            row.baseline_decisions = base.decisions;
            row.program_decisions = prog.decisions;
            row.baseline_time = base.wall_time;
            row.program_time = prog.wall_time;
        } else {
            row.verdict = pre.verdict == BcpVerdict::satisfied ? Verdict::sat : Verdict::unsat;
        }
        if (row.program_conflicts == row.baseline_conflicts) {
            row.percent = 100.0;
        } else if (row.baseline_conflicts == 0) {
            row.percent = std::numeric_limits<double>::infinity();
        } else {
            row.percent = 100.0 * static_cast<double>(row.program_conflicts) /
                          static_cast<double>(row.baseline_conflicts);
        }
        if (std::isfinite(row.percent)) {
            percent_sum += row.percent;
            ++percent_count;
        }
        base_total += row.baseline_conflicts;
        prog_total += row.program_conflicts;
        report.rows.push_back(std::move(row));
    }
    report.mean_percent = percent_count ? percent_sum / static_cast<double>(percent_count) : 100.0;
    if (prog_total == base_total)
        report.total_percent = 100.0;
    else if (base_total == 0)
        report.total_percent = std::numeric_limits<double>::infinity();
    else
        report.total_percent = 100.0 * static_cast<double>(prog_total) / static_cast<double>(base_total);
    return report;
}

Cnf random_ksat(std::uint32_t num_vars, std::size_t num_clauses, std::uint32_t k, std::uint64_t seed) {
    if (k > num_vars) throw std::invalid_argument("clause width exceeds variable count");
    SplitMix64 rng(seed);
    Cnf cnf;
    cnf.num_vars = num_vars;
    cnf.clauses.reserve(num_clauses);
    for (std::size_t c = 0; c < num_clauses; ++c) {
        Clause clause;
        while (clause.size() < k) {
            const auto var = static_cast<std::uint32_t>(1 + rng.below(num_vars));
            bool dup = false;
            for (const auto& l : clause) dup = dup || l.var == var;
            if (dup) continue;
            clause.push_back({var, (rng.next() >> 63) != 0});
        }
        cnf.clauses.push_back(std::move(clause));
    }
    return cnf;
}

}  // namespace satinit
