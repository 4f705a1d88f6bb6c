#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "satinit/satinit.hpp"

namespace py = pybind11;
using namespace satinit;

namespace {

std::vector<std::vector<long>> clauses_of(const Cnf& cnf) {
    std::vector<std::vector<long>> out;
    out.reserve(cnf.clauses.size());
    for (const auto& c : cnf.clauses) {
        std::vector<long> lits;
        for (const Literal& l : c) lits.push_back(l.to_dimacs());
        out.push_back(std::move(lits));
    }
    return out;
}

Cnf make_cnf(std::uint32_t num_vars, const std::vector<std::vector<long>>& clauses) {
    Cnf cnf;
    cnf.num_vars = num_vars;
    for (const auto& c : clauses) {
        Clause clause;
        for (long v : c) {
            if (v == 0 || static_cast<std::uint64_t>(std::labs(v)) > num_vars)
                throw py::value_error("literal " + std::to_string(v) + " out of range");
            clause.push_back(Literal::from_dimacs(v));
        }
        cnf.clauses.push_back(std::move(clause));
    }
    return cnf;
}

py::dict outcome_dict(const SolveOutcome& o) {
    py::dict d;
    d["verdict"] = std::string(to_string(o.verdict));
    d["conflicts"] = o.conflicts;
    d["decisions"] = o.decisions;
    d["propagations"] = o.propagations;
    d["restarts"] = o.restarts;
    d["model"] = o.model;
    d["wall_time"] = o.wall_time;
    return d;
}

SolverConfig solver_config(const py::dict& kw) {
    SolverConfig c;
    for (auto item : kw) {
        const auto key = py::cast<std::string>(item.first);
        const py::handle v = item.second;
        if (key == "var_decay") c.var_decay = py::cast<double>(v);
        else if (key == "clause_decay") c.clause_decay = py::cast<double>(v);
        else if (key == "random_decision_freq") c.random_decision_freq = py::cast<double>(v);
        else if (key == "restart_first") c.restart_first = py::cast<std::uint64_t>(v);
        else if (key == "restart_factor") c.restart_factor = py::cast<double>(v);
        else if (key == "rng_seed") c.rng_seed = py::cast<std::uint64_t>(v);
        else if (key == "increment_mode") {
            const auto mode = py::cast<std::string>(v);
            if (mode == "unit") c.increment_mode = IncrementMode::unit;
            else if (mode == "init_relative") c.increment_mode = IncrementMode::init_relative;
            else throw py::value_error("increment_mode must be 'init_relative' or 'unit'");
        } else {
            throw py::value_error("unknown solver option '" + key + "'");
        }
    }
    c.validate();
    return c;
}

InitProgram program_arg(const py::object& p) {
    if (py::isinstance<InitProgram>(p)) return py::cast<InitProgram>(p);
    const auto text = py::cast<std::string>(p);
    if (text == "zero") return preset("zero");
    if (text.rfind("preset:", 0) == 0) return preset(text.substr(7));
    return parse_program(text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "satinit core bindings";
    m.attr("__version__") = std::string(kVersion);

    py::register_exception<DimacsError>(m, "DimacsError", PyExc_ValueError);
    py::register_exception<ProgramParseError>(m, "ProgramParseError", PyExc_ValueError);
    py::register_exception<HarnessError>(m, "HarnessError", PyExc_RuntimeError);

    py::class_<Cnf>(m, "Cnf")
        .def(py::init(&make_cnf), py::arg("num_vars"), py::arg("clauses"))
        .def_readonly("num_vars", &Cnf::num_vars)
        .def_property_readonly("clauses", &clauses_of)
        .def_property_readonly("num_clauses", &Cnf::num_clauses)
        .def("to_dimacs", [](const Cnf& c) { return write_dimacs(c); })
        .def("__eq__", [](const Cnf& a, const Cnf& b) { return a == b; })
        .def("__repr__", [](const Cnf& c) {
            return "<Cnf vars=" + std::to_string(c.num_vars) + " clauses=" + std::to_string(c.clauses.size()) + ">";
        });

    m.def("parse_dimacs", [](const std::string& text) { return parse_dimacs(text).cnf; }, py::arg("text"));
    m.def("read_dimacs", [](const std::string& path) { return read_dimacs_file(path).cnf; }, py::arg("path"));
    m.def("random_ksat", &random_ksat, py::arg("num_vars"), py::arg("num_clauses"), py::arg("k") = 3,
          py::arg("seed") = 1);

    m.def("var_stats", [](const Cnf& cnf) {
        const VarStats s = compute_var_stats(cnf);
        py::dict d;
        d["xn"] = s.negative;
        d["xp"] = s.positive;
        return d;
    }, py::arg("cnf"));

    m.def("preprocess", [](const Cnf& cnf) {
        BcpResult r = preprocess_bcp(cnf);
        std::vector<long> forced;
        for (const Literal& l : r.forced) forced.push_back(l.to_dimacs());
        return py::make_tuple(std::string(to_string(r.verdict)), r.cnf, forced);
    }, py::arg("cnf"), "Unit propagation. Returns (verdict, reduced cnf, forced literals).");

    m.def("reorder", [](const Cnf& cnf, std::uint64_t seed) {
        Reordered r = reorder(cnf, seed);
        return py::make_tuple(r.cnf, r.mapping.serialize());
    }, py::arg("cnf"), py::arg("seed"), "Returns (reordered cnf, mapping sidecar text).");
    m.def("map_model_back", [](const Model& model, const std::string& mapping) {
        return map_model_back(model, ReorderMapping::parse(mapping));
    }, py::arg("model"), py::arg("mapping"));
    m.def("satisfies", &satisfies, py::arg("cnf"), py::arg("model"));

    m.def("solve", [](const Cnf& cnf, std::optional<std::vector<double>> init, const py::kwargs& kw) {
        const SolverConfig cfg = solver_config(kw);
        SolveOutcome out;
        {
            py::gil_scoped_release release;
            out = init ? solve(cnf, *init, cfg) : solve_with_baseline(cnf, cfg);
        }
        return outcome_dict(out);
    }, py::arg("cnf"), py::arg("init") = py::none(),
       "Solve with initial activities (zero when omitted). Solver options as keyword arguments.");

    py::class_<InitProgram>(m, "Program")
        .def(py::init([](const std::string& text) { return parse_program(text); }), py::arg("text"))
        .def_static("preset", [](const std::string& name) { return preset(name); }, py::arg("name"))
        .def_property_readonly("pre", [](const InitProgram& p) { return print_tree(p.pre); })
        .def_property_readonly("in_", [](const InitProgram& p) { return print_tree(p.in); })
        .def_property_readonly("post", [](const InitProgram& p) { return print_tree(p.post); })
        .def_property_readonly("node_count", &InitProgram::node_count)
        .def_property_readonly("max_depth", &InitProgram::max_depth)
        .def("__str__", [](const InitProgram& p) { return print_program(p); })
        .def("__repr__", [](const InitProgram& p) { return "<Program " + print_program(p) + ">"; })
        .def("__eq__", [](const InitProgram& a, const InitProgram& b) { return a == b; });
    m.def("preset_names", [] {
        std::vector<std::string> out;
        for (auto n : preset_names()) out.emplace_back(n);
        return out;
    });

    m.def("compute_activities", [](const py::object& program, const Cnf& cnf, bool reference) {
        const InitProgram p = program_arg(program);
        const VarStats s = compute_var_stats(cnf);
        return reference ? reference_compute_activities(p, cnf, s) : compute_activities(p, cnf, s);
    }, py::arg("program"), py::arg("cnf"), py::arg("reference") = false);
    m.def("normalize", &normalize, py::arg("activities"));

    m.def("fitness", [](const std::vector<std::pair<std::uint64_t, std::uint64_t>>& per_case, std::size_t nodes) {
        std::vector<CaseStats> cs;
        for (auto [c, d] : per_case) cs.push_back({c, d});
        return fitness(cs, nodes);
    }, py::arg("per_case"), py::arg("node_count"));

    m.def("histogram", [](const Cnf& cnf, std::size_t samples, double lo, double hi, std::uint64_t seed,
                          std::size_t jobs, const py::kwargs& kw) {
        HistogramOptions opt{samples, lo, hi, seed, jobs};
        const SolverConfig cfg = solver_config(kw);
        HistogramReport r;
        {
            py::gil_scoped_release release;
            r = run_histogram(cnf, opt, cfg);
        }
        py::dict d;
        d["kappa0"] = r.baseline.kappa0;
        d["bins"] = r.bins;
        std::vector<py::dict> rows;
        for (const auto& s : r.samples) {
            py::dict row;
            row["sample_id"] = s.id;
            row["seed"] = s.seed;
            row["conflicts"] = s.conflicts;
            row["decisions"] = s.decisions;
            row["percent"] = s.percent;
            rows.push_back(row);
        }
        d["samples"] = rows;
        d["best_sample"] = r.best_sample;
        d["worst_sample"] = r.worst_sample;
        d["config_hash"] = r.config_hash();
        d["histogram_csv"] = r.histogram_csv();
        d["samples_csv"] = r.samples_csv();
        return d;
    }, py::arg("cnf"), py::arg("samples") = 1000, py::arg("lo") = 0.0, py::arg("hi") = 1.0, py::arg("seed") = 1,
       py::arg("jobs") = 1);

    m.def("evolve", [](const std::vector<Cnf>& cases, std::size_t pop, std::size_t gens, std::uint64_t seed,
                       bool normalize_acts, std::size_t tournament, std::size_t jobs) {
        FitnessCaseSet set;
        for (std::size_t i = 0; i < cases.size(); ++i)
            set.cases.push_back(make_fitness_case("case" + std::to_string(i), cases[i]));
        GpConfig cfg;
        cfg.population_size = pop;
        cfg.generations = gens;
        cfg.rng_seed = seed;
        cfg.normalize = normalize_acts;
        cfg.tournament_size = tournament;
        cfg.jobs = jobs;
        EvolutionResult r;
        {
            py::gil_scoped_release release;
            r = run_evolution(set, cfg);
        }
        py::dict d;
        d["best"] = r.best.program;
        d["best_fitness"] = r.best.fitness;
        std::vector<py::dict> log;
        for (const auto& g : r.log) {
            py::dict row;
            row["gen"] = g.generation;
            row["best_fitness"] = g.best_fitness;
            row["mean_fitness"] = g.mean_fitness;
            row["best_nodes"] = g.best_nodes;
            log.push_back(row);
        }
        d["log"] = log;
        return d;
    }, py::arg("cases"), py::arg("pop") = 1000, py::arg("gens") = 5, py::arg("seed") = 1,
       py::arg("normalize") = false, py::arg("tournament") = 10, py::arg("jobs") = 1);

    m.def("validate", [](const py::object& program, const std::vector<std::pair<std::string, Cnf>>& problems,
                         bool normalize_acts) {
        std::vector<ValidationProblem> ps;
        for (const auto& [name, cnf] : problems) ps.push_back({name, cnf});
        const ValidationReport rep = run_validation(program_arg(program), ps, SolverConfig{}, normalize_acts);
        py::dict d;
        std::vector<py::dict> rows;
        for (const auto& r : rep.rows) {
            py::dict row;
            row["problem"] = r.problem;
            row["preprocess"] = r.preprocess;
            row["baseline_conflicts"] = r.baseline_conflicts;
            row["program_conflicts"] = r.program_conflicts;
            row["percent"] = r.percent;
            rows.push_back(row);
        }
        d["rows"] = rows;
        d["mean_percent"] = rep.mean_percent;
        d["total_percent"] = rep.total_percent;
        d["csv"] = rep.csv();
        return d;
    }, py::arg("program"), py::arg("problems"), py::arg("normalize") = true);
}
