// satinit command-line driver.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "satinit/satinit.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace satinit;

namespace {

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError("cannot write '" + path.string() + "'");
    out << text;
}

std::string default_out_dir() {
    const char* env = std::getenv("SATINIT_OUT_DIR");
    return env && *env ? env : "satinit_out";
}

Cnf load_cnf(const std::string& path) {
    ParsedDimacs parsed = read_dimacs_file(path);
    for (const auto& w : parsed.warnings) std::cerr << "warning: " << path << ": " << w << '\n';
    return std::move(parsed.cnf);
}

// "zero", "preset:NAME" or a program file.
InitProgram load_program(const std::string& spec) {
    if (spec == "zero") return preset("zero");
    if (spec.rfind("preset:", 0) == 0) return preset(spec.substr(7));
    return parse_program(read_file(spec));
}

// Solver flags shared by every subcommand.
struct SolverFlags {
    SolverConfig cfg;
    std::string increment = "init_relative";

    void add_to(CLI::App& app) {
        app.add_option("--solver-seed", cfg.rng_seed, "Solver RNG seed (random decisions, tie order)")
            ->capture_default_str();
        app.add_option("--var-decay", cfg.var_decay)->capture_default_str();
        app.add_option("--clause-decay", cfg.clause_decay)->capture_default_str();
        app.add_option("--random-freq", cfg.random_decision_freq, "Random decision frequency")
            ->capture_default_str();
        app.add_option("--restart-first", cfg.restart_first)->capture_default_str();
        app.add_option("--restart-factor", cfg.restart_factor)->capture_default_str();
        app.add_option("--increment", increment, "First bump size: init_relative or unit")
            ->check(CLI::IsMember({"init_relative", "unit"}))
            ->capture_default_str();
    }
    SolverConfig resolve() {
        cfg.increment_mode = increment == "unit" ? IncrementMode::unit : IncrementMode::init_relative;
        cfg.validate();
        return cfg;
    }
};

json manifest(const std::string& command, const json& flags, const std::string& config_hash,
              std::uint64_t master_seed, const std::vector<std::string>& inputs) {
    json m;
    m["command"] = command;
    m["flags"] = flags;
    m["config_hash"] = config_hash;
    m["master_seed"] = master_seed;
    m["version"] = std::string(kVersion);
    json digests = json::object();
    for (const auto& in : inputs) digests[in] = "fnv1a64:" + hex64(fnv1a64(read_file(in)));
    m["inputs"] = digests;
    return m;
}

std::string digest_of(const std::vector<std::string>& inputs) {
    std::string all;
    for (const auto& in : inputs) all += hex64(fnv1a64(read_file(in))) + ';';
    return all;
}

void write_manifest(const fs::path& dir, const json& m) { write_file(dir / "manifest.json", m.dump(2) + '\n'); }

// ---------------------------------------------------------------- solve

struct SolveArgs {
    std::string file;
    std::string init = "zero";
    bool normalize = false;
    bool print_model = false;
    SolverFlags solver;
};

int cmd_solve(SolveArgs& a) {
    const SolverConfig cfg = a.solver.resolve();
    const InitProgram prog = load_program(a.init);
    const Cnf cnf = load_cnf(a.file);
    const BcpResult pre = preprocess_bcp(cnf);

    SolveOutcome out;
    out.verdict = pre.verdict == BcpVerdict::unsatisfiable ? Verdict::unsat : Verdict::sat;
    if (pre.verdict == BcpVerdict::reduced) {
        ActivityVector acts = compute_activities(prog, pre.cnf, compute_var_stats(pre.cnf));
        if (a.normalize) acts = normalize(acts);
        out = solve(pre.cnf, acts, cfg);
    } else if (pre.verdict == BcpVerdict::satisfied) {
        out.model.assign(cnf.num_vars, false);
    }
    if (out.verdict == Verdict::sat) {
        for (const Literal& l : pre.forced) out.model[l.var - 1] = l.positive();
        if (!satisfies(cnf, out.model)) throw std::logic_error("model does not satisfy the input");
    }

    const json flags{{"init", a.init}, {"normalize", a.normalize}, {"solver", cfg.canonical()}};
    const std::string hash = hex64(fnv1a64(cfg.canonical() + ";init=" + print_program(prog) +
                                           ";normalize=" + (a.normalize ? "1" : "0")));
    std::cout << "c manifest " << manifest("solve", flags, hash, cfg.rng_seed, {a.file}).dump() << '\n';
    std::cout << "c preprocess=" << to_string(pre.verdict) << " forced=" << pre.forced.size() << '\n';
    std::cout << "s " << (out.verdict == Verdict::sat ? "SATISFIABLE" : "UNSATISFIABLE") << '\n';
    std::cout << "c conflicts=" << out.conflicts << " decisions=" << out.decisions
              << " propagations=" << out.propagations << '\n';
    if (a.print_model && out.verdict == Verdict::sat) std::cout << format_model(out.model);
    return out.verdict == Verdict::sat ? 10 : 20;
}

// ---------------------------------------------------------------- histogram

struct HistogramArgs {
    std::string file;
    std::size_t samples = 1000;
    std::string range = "0:1";
    std::uint64_t seed = 1;
    std::string out;
    std::size_t jobs = 1;
    std::string reorder;
    SolverFlags solver;
};

std::pair<double, double> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw CliError("--range expects lo:hi, got '" + text + "'");
    try {
        std::size_t n1 = 0, n2 = 0;
        const double lo = std::stod(text.substr(0, colon), &n1);
        const double hi = std::stod(text.substr(colon + 1), &n2);
        if (n1 != colon || n2 != text.size() - colon - 1) throw std::invalid_argument("trailing");
        return {lo, hi};
    } catch (const std::exception&) {
        throw CliError("--range expects lo:hi, got '" + text + "'");
    }
}

void print_summary(const HistogramReport& r) {
    const auto& best = r.samples[r.best_sample];
    const auto& worst = r.samples[r.worst_sample];
    std::cout << r.problem << ": kappa0=" << r.baseline.kappa0 << " samples=" << r.samples.size()
              << " bins=" << r.bins.size() << " best=" << best.percent << "% (seed " << best.seed << ")"
              << " worst=" << worst.percent << "% (seed " << worst.seed << ")\n";
}

int cmd_histogram(HistogramArgs& a) {
    const SolverConfig cfg = a.solver.resolve();
    HistogramOptions opt;
    opt.samples = a.samples;
    std::tie(opt.lo, opt.hi) = parse_range(a.range);
    opt.master_seed = a.seed;
    opt.jobs = a.jobs;
    const fs::path dir = a.out.empty() ? default_out_dir() : a.out;
    const Cnf cnf = preprocess_bcp(load_cnf(a.file)).cnf;
    const std::string problem = fs::path(a.file).filename().string();

    json flags{{"samples", a.samples}, {"range", a.range}, {"seed", a.seed}, {"jobs", a.jobs},
               {"reorder", a.reorder}, {"solver", cfg.canonical()}};
    if (a.reorder.empty()) {
        const HistogramReport r = run_histogram(cnf, opt, cfg, problem);
        write_file(dir / "histogram.csv", r.histogram_csv());
        write_file(dir / "samples.csv", r.samples_csv());
        print_summary(r);
        write_manifest(dir, manifest("histogram", flags, r.config_hash(), a.seed, {a.file}));
        return 0;
    }
    std::optional<std::uint64_t> rseed;
    if (a.reorder != "identity") {
        try {
            rseed = std::stoull(a.reorder);
        } catch (const std::exception&) {
            throw CliError("--reorder expects a seed or 'identity'");
        }
    }
    const ReorderComparison cmp = compare_reordered(cnf, rseed, opt, cfg, problem);
    write_file(dir / "histogram.csv", cmp.original.histogram_csv());
    write_file(dir / "samples.csv", cmp.original.samples_csv());
    write_file(dir / "reordered_histogram.csv", cmp.reordered.histogram_csv());
    write_file(dir / "reordered_samples.csv", cmp.reordered.samples_csv());
    print_summary(cmp.original);
    print_summary(cmp.reordered);
    char ratio[32];
    std::snprintf(ratio, sizeof ratio, "%.4f", cmp.kappa0_ratio);
    std::cout << "kappa0 ratio (reordered/original)=" << ratio
              << " verdicts " << (cmp.verdicts_agree ? "agree" : "DISAGREE") << '\n';
    write_manifest(dir, manifest("histogram", flags, cmp.original.config_hash(), a.seed, {a.file}));
    return cmp.verdicts_agree ? 0 : 1;
}

// ---------------------------------------------------------------- evolve

struct EvolveArgs {
    std::vector<std::string> files;
    GpConfig gp;
    std::string out;
    std::string resume;
    SolverFlags solver;
};

int cmd_evolve(EvolveArgs& a) {
    FitnessCaseSet cases;
    cases.solver = a.solver.resolve();
    for (const auto& f : a.files) {
        try {
            cases.cases.push_back(make_fitness_case(fs::path(f).filename().string(), load_cnf(f)));
        } catch (const std::invalid_argument& e) {
            throw CliError(f + ": " + e.what());
        }
    }
    a.gp.validate();
    const fs::path dir = a.out.empty() ? default_out_dir() : a.out;

    EvolutionResult result;
    if (a.resume.empty()) {
        result = run_evolution(cases, a.gp);
    } else {
        const Checkpoint ckpt = read_checkpoint(read_file(a.resume));
        result = resume_evolution(ckpt.population, ckpt.rng_state, ckpt.generation, cases, a.gp);
    }
    const std::size_t last_gen = result.log.back().generation;

    const std::string hash = hex64(fnv1a64(a.gp.canonical() + ";" + cases.solver.canonical() + ";" +
                                           digest_of(a.files) + (a.resume.empty() ? "" : ";resume")));
    const std::string comment = "# config-hash=" + hash + " master-seed=" + std::to_string(a.gp.rng_seed) + '\n';
    write_file(dir / "best.prog", print_program(result.best.program) + '\n');
    write_file(dir / "log.csv", comment + format_log_csv(result.log));
    std::string bests;
    for (const auto& rec : result.log) {
        char fit[64];
        std::snprintf(fit, sizeof fit, "%.6f", rec.best_fitness);
        bests += "# generation " + std::to_string(rec.generation) + " fitness " + fit + '\n' + rec.best_program +
                 "\n\n";
    }
    write_file(dir / "best_programs.txt", bests);
    write_file(dir / "population.ckpt", write_checkpoint({last_gen, result.rng_state, result.population}));

    json flags{{"pop", a.gp.population_size}, {"gens", a.gp.generations}, {"seed", a.gp.rng_seed},
               {"normalize", a.gp.normalize}, {"tournament", a.gp.tournament_size}, {"jobs", a.gp.jobs},
               {"resume", a.resume}, {"gp", a.gp.canonical()}, {"solver", cases.solver.canonical()}};
    std::vector<std::string> inputs = a.files;
    if (!a.resume.empty()) inputs.push_back(a.resume);
    write_manifest(dir, manifest("evolve", flags, hash, a.gp.rng_seed, inputs));

    char fit[64];
    std::snprintf(fit, sizeof fit, "%.6f", result.best.fitness);
    std::cout << "best fitness " << fit << " nodes " << result.best.node_count << '\n'
              << print_program(result.best.program) << '\n';
    return 0;
}

// ---------------------------------------------------------------- reorder, map-model, verify

struct ReorderArgs {
    std::string file;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_reorder(ReorderArgs& a) {
    const Cnf cnf = load_cnf(a.file);
    const Reordered r = reorder(cnf, a.seed);
    const fs::path out = a.out.empty() ? fs::path(default_out_dir()) / fs::path(a.file).filename() : fs::path(a.out);
    write_file(out, write_dimacs(r.cnf, "reordered with seed " + std::to_string(a.seed)));
    write_file(out.string() + ".map", r.mapping.serialize());
    std::cout << "wrote " << out.string() << " and " << out.string() << ".map\n";
    return 0;
}

Model read_model(const std::string& text, std::uint32_t num_vars) {
    Model m(num_vars, false);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) != 0) continue;
        std::istringstream ls(line.substr(2));
        long lit = 0;
        while (ls >> lit) {
            if (lit == 0) continue;
            const auto var = static_cast<std::uint32_t>(std::labs(lit));
            if (var > num_vars) throw CliError("model literal " + std::to_string(lit) + " out of range");
            m[var - 1] = lit > 0;
        }
    }
    return m;
}

struct MapModelArgs {
    std::string mapping;
    std::string model;
};

int cmd_map_model(MapModelArgs& a) {
    const ReorderMapping map = ReorderMapping::parse(read_file(a.mapping));
    const Model reordered = read_model(read_file(a.model), static_cast<std::uint32_t>(map.var_to_new.size()));
    std::cout << format_model(map_model_back(reordered, map));
    return 0;
}

struct VerifyArgs {
    std::string file;
    std::string model;
};

int cmd_verify(VerifyArgs& a) {
    const Cnf cnf = load_cnf(a.file);
    const bool ok = satisfies(cnf, read_model(read_file(a.model), cnf.num_vars));
    std::cout << (ok ? "model satisfies " : "model does NOT satisfy ") << a.file << '\n';
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
    std::string program;
    std::vector<std::string> files;
    std::string out;
    bool raw = false;
    SolverFlags solver;
};

int cmd_validate(ValidateArgs& a) {
    const SolverConfig cfg = a.solver.resolve();
    const InitProgram prog = load_program(a.program);
    std::vector<ValidationProblem> problems;
    for (const auto& f : a.files) problems.push_back({fs::path(f).filename().string(), load_cnf(f)});
    const ValidationReport rep = run_validation(prog, problems, cfg, !a.raw);
    const fs::path dir = a.out.empty() ? default_out_dir() : a.out;
    write_file(dir / "validation.csv", rep.csv());
    for (const auto& row : rep.rows) {
        char pct[32];
        std::snprintf(pct, sizeof pct, "%.2f", row.percent);
        std::cout << row.problem << ": " << row.program_conflicts << "/" << row.baseline_conflicts << " conflicts ("
                  << pct << "%)\n";
    }
    char agg[64];
    std::snprintf(agg, sizeof agg, "mean %.2f%% total %.2f%%", rep.mean_percent, rep.total_percent);
    std::cout << agg << '\n';
    std::vector<std::string> inputs = a.files;
    if (a.program != "zero" && a.program.rfind("preset:", 0) != 0) inputs.insert(inputs.begin(), a.program);
    json flags{{"program", a.program}, {"normalize", !a.raw}, {"solver", cfg.canonical()}};
    write_manifest(dir, manifest("validate", flags, rep.config_hash(), 0, inputs));
    return 0;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    std::uint32_t vars = 50;
    std::size_t clauses = 0;
    std::uint32_t k = 3;
    std::uint64_t seed = 1;
    std::size_t count = 1;
    std::string out;
    std::string prefix = "rand";
};

int cmd_generate(GenerateArgs& a) {
    const std::size_t nc = a.clauses ? a.clauses : static_cast<std::size_t>(a.vars * 4.26 + 0.5);
    const fs::path dir = a.out.empty() ? default_out_dir() : a.out;
    for (std::size_t i = 0; i < a.count; ++i) {
        const std::uint64_t seed = a.count == 1 ? a.seed : derive_seed(a.seed, i);
        const Cnf cnf = random_ksat(a.vars, nc, a.k, seed);
        const std::string name = a.prefix + std::to_string(a.vars) + "-" + std::to_string(nc) + "-s" +
                                 std::to_string(seed) + ".cnf";
        write_file(dir / name, write_dimacs(cnf, "random " + std::to_string(a.k) + "-SAT, seed " + std::to_string(seed)));
        std::cout << (dir / name).string() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"satinit: evolved activity initialization for a CDCL solver"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    int code = 0;

    SolveArgs solve_args;
    auto* sc = app.add_subcommand("solve", "Solve a DIMACS file with an initialization program");
    sc->add_option("file", solve_args.file, "DIMACS CNF")->required();
    sc->add_option("--init", solve_args.init, "zero, preset:NAME or a program file")->capture_default_str();
    sc->add_flag("--normalize", solve_args.normalize, "Divide activities by their largest magnitude");
    sc->add_flag("--model", solve_args.print_model, "Print v lines");
    solve_args.solver.add_to(*sc);
    sc->add_option("--seed", solve_args.solver.cfg.rng_seed, "Alias of --solver-seed");
    sc->callback([&] { code = cmd_solve(solve_args); });

    HistogramArgs hist_args;
    auto* hc = app.add_subcommand("histogram", "Random-initialization histogram relative to zero init");
    hc->add_option("file", hist_args.file, "DIMACS CNF")->required();
    hc->add_option("--samples", hist_args.samples)->capture_default_str();
    hc->add_option("--range", hist_args.range, "lo:hi")->capture_default_str();
    hc->add_option("--seed", hist_args.seed, "Master seed")->capture_default_str();
    hc->add_option("--out", hist_args.out, "Output directory (default $SATINIT_OUT_DIR or satinit_out)");
    hc->add_option("--jobs", hist_args.jobs)->capture_default_str();
    hc->add_option("--reorder", hist_args.reorder, "Also histogram a reordering: a seed or 'identity'");
    hist_args.solver.add_to(*hc);
    hc->callback([&] { code = cmd_histogram(hist_args); });

    EvolveArgs evo_args;
    auto* ec = app.add_subcommand("evolve", "Evolve an initialization program on fitness cases");
    ec->add_option("files", evo_args.files, "DIMACS fitness cases")->required();
    ec->add_option("--pop", evo_args.gp.population_size)->capture_default_str();
    ec->add_option("--gens", evo_args.gp.generations)->capture_default_str();
    ec->add_option("--seed", evo_args.gp.rng_seed)->capture_default_str();
    ec->add_option("--tournament", evo_args.gp.tournament_size)->capture_default_str();
    ec->add_option("--crossover-prob", evo_args.gp.crossover_prob)->capture_default_str();
    ec->add_option("--creation-prob", evo_args.gp.creation_prob)->capture_default_str();
    ec->add_option("--mutation-prob", evo_args.gp.mutation_prob)->capture_default_str();
    ec->add_option("--creation-depth", evo_args.gp.creation_max_depth)->capture_default_str();
    ec->add_option("--crossover-depth", evo_args.gp.crossover_max_depth)->capture_default_str();
    ec->add_flag("--normalize", evo_args.gp.normalize);
    ec->add_option("--jobs", evo_args.gp.jobs)->capture_default_str();
    ec->add_option("--out", evo_args.out, "Output directory (default $SATINIT_OUT_DIR or satinit_out)");
    ec->add_option("--resume", evo_args.resume, "Continue from a population.ckpt");
    evo_args.solver.add_to(*ec);
    ec->callback([&] { code = cmd_evolve(evo_args); });

    ReorderArgs ro_args;
    auto* rc = app.add_subcommand("reorder", "Shuffle variables, polarities and clauses");
    rc->add_option("file", ro_args.file, "DIMACS CNF")->required();
    rc->add_option("--seed", ro_args.seed)->capture_default_str();
    rc->add_option("--out", ro_args.out, "Output CNF path; the mapping goes to <out>.map");
    rc->callback([&] { code = cmd_reorder(ro_args); });

    MapModelArgs mm_args;
    auto* mc = app.add_subcommand("map-model", "Translate a model of a reordered CNF back to the original");
    mc->add_option("mapping", mm_args.mapping, "Mapping sidecar (.map)")->required();
    mc->add_option("model", mm_args.model, "File with v lines")->required();
    mc->callback([&] { code = cmd_map_model(mm_args); });

    VerifyArgs ver_args;
    auto* vc = app.add_subcommand("verify", "Check a model (v lines) against a CNF");
    vc->add_option("file", ver_args.file, "DIMACS CNF")->required();
    vc->add_option("model", ver_args.model, "File with v lines")->required();
    vc->callback([&] { code = cmd_verify(ver_args); });

    ValidateArgs val_args;
    auto* lc = app.add_subcommand("validate", "Compare a program against zero init on held-out problems");
    lc->add_option("program", val_args.program, "zero, preset:NAME or a program file")->required();
    lc->add_option("files", val_args.files, "DIMACS problems")->required();
    lc->add_option("--out", val_args.out, "Output directory (default $SATINIT_OUT_DIR or satinit_out)");
    lc->add_flag("--raw", val_args.raw, "Use activities without normalization");
    val_args.solver.add_to(*lc);
    lc->callback([&] { code = cmd_validate(val_args); });

    GenerateArgs gen_args;
    auto* gc = app.add_subcommand("generate", "Write uniform random k-SAT instances");
    gc->add_option("--vars", gen_args.vars)->capture_default_str();
    gc->add_option("--clauses", gen_args.clauses, "Default: round(4.26 * vars)");
    gc->add_option("--k", gen_args.k)->capture_default_str();
    gc->add_option("--seed", gen_args.seed)->capture_default_str();
    gc->add_option("--count", gen_args.count)->capture_default_str();
    gc->add_option("--prefix", gen_args.prefix)->capture_default_str();
    gc->add_option("--out", gen_args.out, "Output directory (default $SATINIT_OUT_DIR or satinit_out)");
    gc->callback([&] { code = cmd_generate(gen_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return code;
}
