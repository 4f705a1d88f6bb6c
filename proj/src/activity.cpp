#include "satinit/activity.hpp"

#include <cmath>

namespace satinit {

std::vector<std::size_t> clause_visit_order(const Cnf& cnf) {
    std::vector<std::size_t> order;
    order.reserve(cnf.clauses.size());
    for (std::size_t i = 0; i < cnf.clauses.size(); ++i)
        if (cnf.clauses[i].size() == 2) order.push_back(i);
    for (std::size_t i = 0; i < cnf.clauses.size(); ++i)
        if (cnf.clauses[i].size() != 2) order.push_back(i);
    return order;
}

namespace {

EvalContext global_context(const Cnf& cnf, const VarStats& stats, std::uint32_t var) {
    EvalContext ctx;
    ctx.xn = stats.xn(var);
    ctx.xp = stats.xp(var);
    ctx.xc = stats.xc(var);
    ctx.nv = cnf.num_vars;
    ctx.nc = static_cast<double>(cnf.clauses.size());
    return ctx;
}

void set_loop_terms(EvalContext& ctx, const VarStats& stats, const Clause& clause, Literal x, Literal l,
                    double ic, double il) {
    ctx.ln = stats.xn(l.var);
    ctx.lp = stats.xp(l.var);
    ctx.lc = stats.xc(l.var);
    ctx.cs = static_cast<double>(clause.size());
    ctx.xs = x.positive() ? 1.0 : 0.0;
    ctx.ls = l.positive() ? 1.0 : 0.0;
    ctx.ic = ic;
    ctx.il = il;
}

bool within_bounds(const EvalContext& ctx) {
    return ctx.ic >= 0 && ctx.ic < ctx.xc && ctx.il >= 0 && ctx.il < ctx.cs - 1 && (ctx.xs == 0 || ctx.xs == 1) &&
           (ctx.ls == 0 || ctx.ls == 1);
}

}  // namespace

ActivityVector compute_activities(const InitProgram& prog, const Cnf& cnf, const VarStats& stats,
                                  EvalCounters* counters) {
    const std::uint32_t nv = cnf.num_vars;
    std::vector<Registers> regs(nv);
    std::vector<EvalContext> contexts(nv);
    std::vector<std::uint32_t> clause_index(nv, 0);

    for (std::uint32_t v = 1; v <= nv; ++v) {
        contexts[v - 1] = global_context(cnf, stats, v);
        eval_tree(prog.pre, contexts[v - 1], regs[v - 1], counters);
    }

    for (std::size_t ci : clause_visit_order(cnf)) {
        const Clause& clause = cnf.clauses[ci];
        for (std::size_t xi = 0; xi < clause.size(); ++xi) {
            const Literal x = clause[xi];
            EvalContext& ctx = contexts[x.var - 1];
            Registers& r = regs[x.var - 1];
            const double ic = clause_index[x.var - 1]++;
            std::size_t il = 0;
            for (std::size_t li = 0; li < clause.size(); ++li) {
                if (li == xi) continue;
                set_loop_terms(ctx, stats, clause, x, clause[li], ic, static_cast<double>(il++));
                if (counters) {
                    ++counters->in_runs;
                    if (!within_bounds(ctx)) ++counters->bound_violations;
                }
                eval_tree(prog.in, ctx, r, counters);
            }
        }
    }

    ActivityVector acts(nv);
    for (std::uint32_t v = 1; v <= nv; ++v) {
        // POST sees only the global terminals
        const EvalContext ctx = global_context(cnf, stats, v);
        eval_tree(prog.post, ctx, regs[v - 1], counters);
        acts[v - 1] = clamp_value(regs[v - 1].a0);
    }
    return acts;
}

ActivityVector reference_compute_activities(const InitProgram& prog, const Cnf& cnf, const VarStats& stats) {
    const auto order = clause_visit_order(cnf);
    ActivityVector acts(cnf.num_vars);
    for (std::uint32_t v = 1; v <= cnf.num_vars; ++v) {
        Registers r;
        const EvalContext base = global_context(cnf, stats, v);
        eval_tree(prog.pre, base, r);
        std::size_t ic = 0;
        for (std::size_t ci : order) {
            const Clause& clause = cnf.clauses[ci];
            std::size_t xi = clause.size();
            for (std::size_t k = 0; k < clause.size(); ++k)
                if (clause[k].var == v) xi = k;
            if (xi == clause.size()) continue;
            std::size_t il = 0;
            for (std::size_t li = 0; li < clause.size(); ++li) {
                if (li == xi) continue;
                EvalContext ctx = base;
                set_loop_terms(ctx, stats, clause, clause[xi], clause[li], static_cast<double>(ic),
                               static_cast<double>(il++));
                eval_tree(prog.in, ctx, r);
            }
            ++ic;
        }
        eval_tree(prog.post, base, r);
        acts[v - 1] = clamp_value(r.a0);
    }
    return acts;
}

ActivityVector normalize(const ActivityVector& acts) {
    double max_abs = 0.0;
    for (double a : acts) max_abs = std::max(max_abs, std::fabs(a));
    if (max_abs == 0.0) return acts;
    ActivityVector out(acts.size());
    for (std::size_t i = 0; i < acts.size(); ++i) out[i] = acts[i] / max_abs;
    return out;
}

}  // namespace satinit
