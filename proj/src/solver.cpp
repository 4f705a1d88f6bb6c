#include "satinit/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "satinit/rng.hpp"

namespace satinit {

void SolverConfig::validate() const {
    if (!(var_decay > 0.0 && var_decay < 1.0)) throw std::invalid_argument("var_decay must be in (0,1)");
    if (!(clause_decay > 0.0 && clause_decay < 1.0)) throw std::invalid_argument("clause_decay must be in (0,1)");
    if (!(random_decision_freq >= 0.0 && random_decision_freq < 1.0))
        throw std::invalid_argument("random_decision_freq must be in [0,1)");
    if (!(rescale_threshold > 1.0)) throw std::invalid_argument("rescale_threshold must be > 1");
    if (restart_first < 1) throw std::invalid_argument("restart_first must be >= 1");
    if (!(restart_factor >= 1.0)) throw std::invalid_argument("restart_factor must be >= 1");
    if (!(learnt_db_initial_fraction > 0.0)) throw std::invalid_argument("learnt_db_initial_fraction must be > 0");
    if (!(learnt_db_growth >= 1.0)) throw std::invalid_argument("learnt_db_growth must be >= 1");
}

std::string SolverConfig::canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "var_decay=" << var_decay << ";clause_decay=" << clause_decay
       << ";random_decision_freq=" << random_decision_freq << ";rescale_threshold=" << rescale_threshold
       << ";restart_first=" << restart_first << ";restart_factor=" << restart_factor
       << ";learnt_db_initial_fraction=" << learnt_db_initial_fraction
       << ";learnt_db_growth=" << learnt_db_growth
       << ";increment_mode=" << (increment_mode == IncrementMode::unit ? "unit" : "init_relative")
       << ";rng_seed=" << rng_seed;
    return os.str();
}

const char* to_string(Verdict v) { return v == Verdict::sat ? "sat" : "unsat"; }

std::string format_model(const Model& model) {
    std::string out;
    std::string line = "v";
    for (std::size_t i = 0; i < model.size(); ++i) {
        const std::string tok = ' ' + std::string(model[i] ? "" : "-") + std::to_string(i + 1);
        if (line.size() + tok.size() > 78) {
            out += line + '\n';
            line = "v";
        }
        line += tok;
    }
    out += line + " 0\n";
    return out;
}

namespace {

// Literal code: 2 * var + sign, var 0-based, sign 1 = negative.
using Lit = std::uint32_t;
inline Lit make_lit(std::uint32_t var0, bool negative) { return 2 * var0 + (negative ? 1u : 0u); }
inline std::uint32_t var_of(Lit l) { return l >> 1; }
inline bool sign_of(Lit l) { return l & 1u; }
inline Lit neg(Lit l) { return l ^ 1u; }

constexpr std::uint32_t kNoReason = 0xffffffffu;

struct ClauseData {
    std::vector<Lit> lits;
    double activity = 0.0;
    bool learnt = false;
};

struct Watcher {
    std::uint32_t cref;
    Lit blocker;
};

// Max-heap over variables keyed on (activity, then lower tie priority).
class VarOrder {
public:
    VarOrder(const std::vector<double>& activity, const std::vector<std::uint32_t>& priority)
        : act_(activity), prio_(priority), index_(activity.size(), -1) {}

    bool empty() const { return heap_.empty(); }
    bool contains(std::uint32_t v) const { return index_[v] >= 0; }

    void insert(std::uint32_t v) {
        if (contains(v)) return;
        index_[v] = static_cast<int>(heap_.size());
        heap_.push_back(v);
        up(heap_.size() - 1);
    }

    void increased(std::uint32_t v) {
        if (contains(v)) up(static_cast<std::size_t>(index_[v]));
    }

    std::uint32_t pop() {
        const std::uint32_t top = heap_.front();
        heap_.front() = heap_.back();
        index_[heap_.front()] = 0;
        index_[top] = -1;
        heap_.pop_back();
        if (heap_.size() > 1) down(0);
        return top;
    }

private:
    bool before(std::uint32_t a, std::uint32_t b) const {
        return act_[a] > act_[b] || (act_[a] == act_[b] && prio_[a] < prio_[b]);
    }
    void up(std::size_t i) {
        const std::uint32_t v = heap_[i];
        while (i > 0) {
            const std::size_t parent = (i - 1) / 2;
            if (!before(v, heap_[parent])) break;
            heap_[i] = heap_[parent];
            index_[heap_[i]] = static_cast<int>(i);
            i = parent;
        }
        heap_[i] = v;
        index_[v] = static_cast<int>(i);
    }
    void down(std::size_t i) {
        const std::uint32_t v = heap_[i];
        for (;;) {
            std::size_t child = 2 * i + 1;
            if (child >= heap_.size()) break;
            if (child + 1 < heap_.size() && before(heap_[child + 1], heap_[child])) ++child;
            if (!before(heap_[child], v)) break;
            heap_[i] = heap_[child];
            index_[heap_[i]] = static_cast<int>(i);
            i = child;
        }
        heap_[i] = v;
        index_[v] = static_cast<int>(i);
    }

    const std::vector<double>& act_;
    const std::vector<std::uint32_t>& prio_;
    std::vector<int> index_;
    std::vector<std::uint32_t> heap_;
};

class Cdcl {
public:
    Cdcl(const Cnf& cnf, std::span<const double> init, const SolverConfig& config)
        : config_(config),
          rng_(config.rng_seed),
          num_vars_(cnf.num_vars),
          watches_(2 * static_cast<std::size_t>(cnf.num_vars)),
          value_(cnf.num_vars, 0),
          level_(cnf.num_vars, 0),
          reason_(cnf.num_vars, kNoReason),
          seen_(cnf.num_vars, 0),
          activity_(init.begin(), init.end()),
          priority_(cnf.num_vars),
          decision_var_(cnf.num_vars, false),
          order_(activity_, priority_) {
        double scale = 1.0;
        if (config.increment_mode == IncrementMode::init_relative) {
            double max_abs = 0.0;
            for (double a : activity_) max_abs = std::max(max_abs, std::fabs(a));
            if (max_abs > 0.0) scale = max_abs;
        }
        // Activities are held in units of the init magnitude with a unit first bump,
        // which equals bumping raw activities by `scale`.
        if (scale != 1.0)
            for (double& a : activity_) a /= scale;

        std::iota(priority_.begin(), priority_.end(), 0u);
        rng_.shuffle(priority_);
    }

    SolveOutcome run(const Cnf& cnf) {
        SolveOutcome out;
        if (!load(cnf) || propagate() != kNoReason) {
            out.verdict = Verdict::unsat;
            fill_counters(out);
            return out;
        }
        for (std::uint32_t v = 0; v < num_vars_; ++v)
            if (decision_var_[v]) order_.insert(v);

        double conflict_budget = static_cast<double>(config_.restart_first);
        max_learnts_ = static_cast<double>(num_problem_clauses_) * config_.learnt_db_initial_fraction;
        for (;;) {
            const int status = search(static_cast<std::uint64_t>(conflict_budget));
            if (status != 0) {
                out.verdict = status > 0 ? Verdict::sat : Verdict::unsat;
                break;
            }
            ++restarts_;
            conflict_budget *= config_.restart_factor;
            max_learnts_ *= config_.learnt_db_growth;
        }
        if (out.verdict == Verdict::sat) {
            out.model.resize(num_vars_);
            for (std::uint32_t v = 0; v < num_vars_; ++v) out.model[v] = value_[v] > 0;
            if (!satisfies(cnf, out.model)) throw std::logic_error("solver produced a model that violates the CNF");
        }
        fill_counters(out);
        return out;
    }

private:
    int lit_value(Lit l) const {
        const int v = value_[var_of(l)];
        return sign_of(l) ? -v : v;
    }
    std::uint32_t decision_level() const { return static_cast<std::uint32_t>(trail_lim_.size()); }

    void fill_counters(SolveOutcome& out) const {
        out.conflicts = conflicts_;
        out.decisions = decisions_;
        out.propagations = propagations_;
        out.restarts = restarts_;
    }

    bool load(const Cnf& cnf) {
        for (const auto& clause : cnf.clauses) {
            for (const auto& lit : clause) decision_var_[lit.var - 1] = true;
        }
        for (const auto& clause : cnf.clauses) {
            if (clause.empty()) return false;
            if (clause.size() == 1) {
                const Lit l = make_lit(clause[0].var - 1, clause[0].negative);
                const int v = lit_value(l);
                if (v < 0) return false;
                if (v == 0) enqueue(l, kNoReason);
                continue;
            }
            ClauseData c;
            c.lits.reserve(clause.size());
            for (const auto& lit : clause) c.lits.push_back(make_lit(lit.var - 1, lit.negative));
            attach(add_clause(std::move(c)));
            ++num_problem_clauses_;
        }
        return true;
    }

    std::uint32_t add_clause(ClauseData c) {
        clauses_.push_back(std::move(c));
        return static_cast<std::uint32_t>(clauses_.size() - 1);
    }

    void attach(std::uint32_t cref) {
        const auto& lits = clauses_[cref].lits;
        watches_[neg(lits[0])].push_back({cref, lits[1]});
        watches_[neg(lits[1])].push_back({cref, lits[0]});
    }

    void enqueue(Lit l, std::uint32_t reason) {
        const std::uint32_t v = var_of(l);
        value_[v] = sign_of(l) ? -1 : 1;
        level_[v] = decision_level();
        reason_[v] = reason;
        trail_.push_back(l);
    }

    // Returns the conflicting clause or kNoReason.
    std::uint32_t propagate() {
        std::uint32_t conflict = kNoReason;
        while (qhead_ < trail_.size()) {
            const Lit p = trail_[qhead_++];  // p became true; clauses watching ~p are visited
            ++propagations_;
            auto& ws = watches_[p];
            std::size_t i = 0, j = 0;
            const Lit false_lit = neg(p);
            while (i < ws.size()) {
                const Watcher w = ws[i];
                if (lit_value(w.blocker) > 0) {
                    ws[j++] = ws[i++];
                    continue;
                }
                auto& lits = clauses_[w.cref].lits;
                if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
                ++i;
                const Lit first = lits[0];
                if (first != w.blocker && lit_value(first) > 0) {
                    ws[j++] = {w.cref, first};
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < lits.size(); ++k) {
                    if (lit_value(lits[k]) >= 0) {
                        std::swap(lits[1], lits[k]);
                        watches_[neg(lits[1])].push_back({w.cref, first});
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                ws[j++] = {w.cref, first};
                if (lit_value(first) < 0) {
                    conflict = w.cref;
                    qhead_ = trail_.size();
                    while (i < ws.size()) ws[j++] = ws[i++];
                } else {
                    enqueue(first, w.cref);
                }
            }
            ws.resize(j);
            if (conflict != kNoReason) break;
        }
        return conflict;
    }

    void bump_var(std::uint32_t v) {
        activity_[v] += var_inc_;
        if (activity_[v] > config_.rescale_threshold) {
            for (double& a : activity_) a *= 1e-100;
            var_inc_ *= 1e-100;
        }
        order_.increased(v);
    }

    void bump_clause(ClauseData& c) {
        c.activity += cla_inc_;
        if (c.activity > 1e20) {
            for (auto& cl : clauses_)
                if (cl.learnt) cl.activity *= 1e-20;
            cla_inc_ *= 1e-20;
        }
    }

    // First-UIP conflict analysis. learnt[0] is the asserting literal.
    void analyze(std::uint32_t conflict, std::vector<Lit>& learnt, std::uint32_t& backtrack_level) {
        learnt.clear();
        learnt.push_back(0);
        int path_count = 0;
        bool have_p = false;
        Lit p = 0;
        std::size_t index = trail_.size();
        std::uint32_t cref = conflict;
        do {
            ClauseData& c = clauses_[cref];
            if (c.learnt) bump_clause(c);
            for (std::size_t k = have_p ? 1 : 0; k < c.lits.size(); ++k) {
                const Lit q = c.lits[k];
                const std::uint32_t v = var_of(q);
                if (!seen_[v] && level_[v] > 0) {
                    bump_var(v);
                    seen_[v] = 1;
                    if (level_[v] >= decision_level())
                        ++path_count;
                    else
                        learnt.push_back(q);
                }
            }
            while (!seen_[var_of(trail_[--index])]) {
            }
            p = trail_[index];
            cref = reason_[var_of(p)];
            seen_[var_of(p)] = 0;
            have_p = true;
            --path_count;
        } while (path_count > 0);
        learnt[0] = neg(p);

        backtrack_level = 0;
        if (learnt.size() > 1) {
            std::size_t max_i = 1;
            for (std::size_t k = 2; k < learnt.size(); ++k)
                if (level_[var_of(learnt[k])] > level_[var_of(learnt[max_i])]) max_i = k;
            std::swap(learnt[1], learnt[max_i]);
            backtrack_level = level_[var_of(learnt[1])];
        }
        for (std::size_t k = 1; k < learnt.size(); ++k) seen_[var_of(learnt[k])] = 0;
    }

    void cancel_until(std::uint32_t level) {
        if (decision_level() <= level) return;
        for (std::size_t c = trail_.size(); c-- > trail_lim_[level];) {
            const std::uint32_t v = var_of(trail_[c]);
            value_[v] = 0;
            reason_[v] = kNoReason;
            order_.insert(v);
        }
        trail_.resize(trail_lim_[level]);
        trail_lim_.resize(level);
        qhead_ = trail_.size();
    }

    bool locked(std::uint32_t cref) const {
        const Lit first = clauses_[cref].lits[0];
        return lit_value(first) > 0 && reason_[var_of(first)] == cref;
    }

    void reduce_db() {
        std::vector<std::uint32_t> learnts;
        for (std::uint32_t i = 0; i < clauses_.size(); ++i)
            if (clauses_[i].learnt) learnts.push_back(i);
        std::stable_sort(learnts.begin(), learnts.end(), [&](std::uint32_t a, std::uint32_t b) {
            const bool bin_a = clauses_[a].lits.size() == 2;
            const bool bin_b = clauses_[b].lits.size() == 2;
            if (bin_a != bin_b) return bin_b;
            return clauses_[a].activity < clauses_[b].activity;
        });
        const double extra_lim = learnts.empty() ? 0.0 : cla_inc_ / static_cast<double>(learnts.size());
        std::vector<bool> remove(clauses_.size(), false);
        for (std::size_t i = 0; i < learnts.size(); ++i) {
            const std::uint32_t cref = learnts[i];
            const ClauseData& c = clauses_[cref];
            if (c.lits.size() <= 2 || locked(cref)) continue;
            if (i < learnts.size() / 2 || c.activity < extra_lim) remove[cref] = true;
        }
        compact(remove);
    }

    void compact(const std::vector<bool>& remove) {
        std::vector<std::uint32_t> remap(clauses_.size(), kNoReason);
        std::size_t out = 0;
        for (std::size_t i = 0; i < clauses_.size(); ++i) {
            if (remove[i]) continue;
            remap[i] = static_cast<std::uint32_t>(out);
            if (out != i) clauses_[out] = std::move(clauses_[i]);
            ++out;
        }
        clauses_.resize(out);
        for (std::uint32_t v = 0; v < num_vars_; ++v)
            if (reason_[v] != kNoReason) reason_[v] = remap[reason_[v]];
        for (auto& ws : watches_) {
            std::size_t j = 0;
            for (const auto& w : ws)
                if (remap[w.cref] != kNoReason) ws[j++] = {remap[w.cref], w.blocker};
            ws.resize(j);
        }
    }

    // Picks the next decision variable or returns num_vars_ if all are assigned.
    std::uint32_t pick_branch_var() {
        if (rng_.uniform() < config_.random_decision_freq) {
            std::uint64_t unassigned = 0;
            for (std::uint32_t v = 0; v < num_vars_; ++v)
                if (decision_var_[v] && value_[v] == 0) ++unassigned;
            if (unassigned > 0) {
                std::uint64_t k = rng_.below(unassigned);
                for (std::uint32_t v = 0; v < num_vars_; ++v) {
                    if (decision_var_[v] && value_[v] == 0 && k-- == 0) return v;
                }
            }
        }
        while (!order_.empty()) {
            const std::uint32_t v = order_.pop();
            if (value_[v] == 0) return v;
        }
        return num_vars_;
    }

    // 1 sat, -1 unsat, 0 restart
    int search(std::uint64_t conflict_budget) {
        std::uint64_t local_conflicts = 0;
        std::vector<Lit> learnt;
        for (;;) {
            const std::uint32_t conflict = propagate();
            if (conflict != kNoReason) {
                ++conflicts_;
                ++local_conflicts;
                if (decision_level() == 0) return -1;
                std::uint32_t bt = 0;
                analyze(conflict, learnt, bt);
                cancel_until(bt);
                if (learnt.size() == 1) {
                    enqueue(learnt[0], kNoReason);
                } else {
                    ClauseData c;
                    c.lits = learnt;
                    c.learnt = true;
                    const std::uint32_t cref = add_clause(std::move(c));
                    attach(cref);
                    bump_clause(clauses_[cref]);
                    enqueue(learnt[0], cref);
                }
                var_inc_ /= config_.var_decay;
                cla_inc_ /= config_.clause_decay;
                continue;
            }
            if (local_conflicts >= conflict_budget) {
                cancel_until(0);
                return 0;
            }
            if (static_cast<double>(count_learnts()) - static_cast<double>(trail_.size()) >= max_learnts_) {
                reduce_db();
            }
            const std::uint32_t next = pick_branch_var();
            if (next == num_vars_) return 1;
            ++decisions_;
            trail_lim_.push_back(trail_.size());
            enqueue(make_lit(next, true), kNoReason);
        }
    }

    std::size_t count_learnts() const { return clauses_.size() - num_problem_clauses_; }

    const SolverConfig& config_;
    SplitMix64 rng_;
    std::uint32_t num_vars_;
    std::vector<ClauseData> clauses_;
    std::vector<std::vector<Watcher>> watches_;
    std::vector<signed char> value_;
    std::vector<std::uint32_t> level_;
    std::vector<std::uint32_t> reason_;
    std::vector<char> seen_;
    std::vector<double> activity_;
    std::vector<std::uint32_t> priority_;
    std::vector<bool> decision_var_;
    VarOrder order_;
    std::vector<Lit> trail_;
    std::vector<std::size_t> trail_lim_;
    std::size_t qhead_ = 0;
    double var_inc_ = 1.0;
    double cla_inc_ = 1.0;
    double max_learnts_ = 0.0;
    std::size_t num_problem_clauses_ = 0;
    std::uint64_t conflicts_ = 0;
    std::uint64_t decisions_ = 0;
    std::uint64_t propagations_ = 0;
    std::uint64_t restarts_ = 0;
};

}  // namespace

SolveOutcome solve(const Cnf& cnf, std::span<const double> init, const SolverConfig& config) {
    config.validate();
    if (init.size() != cnf.num_vars) {
        throw SolverError("activity vector has " + std::to_string(init.size()) + " entries, CNF has " +
                          std::to_string(cnf.num_vars) + " variables");
    }
    for (std::size_t i = 0; i < init.size(); ++i) {
        if (!std::isfinite(init[i]))
            throw SolverError("non-finite initial activity for variable " + std::to_string(i + 1));
    }
    const auto start = std::chrono::steady_clock::now();
    Cdcl solver(cnf, init, config);
    SolveOutcome out = solver.run(cnf);
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

SolveOutcome solve_with_baseline(const Cnf& cnf, const SolverConfig& config) {
    const std::vector<double> zeros(cnf.num_vars, 0.0);
    return solve(cnf, zeros, config);
}

}  // namespace satinit
