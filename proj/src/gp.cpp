#include "satinit/gp.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "satinit/activity.hpp"

namespace satinit {

void GpConfig::validate() const {
    auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must be in [0,1]");
    };
    prob(crossover_prob, "crossover_prob");
    prob(creation_prob, "creation_prob");
    prob(mutation_prob, "mutation_prob");
    if (crossover_prob + creation_prob + mutation_prob > 1.0 + 1e-12)
        throw std::invalid_argument("crossover, creation and mutation probabilities sum to more than 1");
    if (population_size < 1) throw std::invalid_argument("population_size must be >= 1");
    if (creation_max_depth < 2) throw std::invalid_argument("creation_max_depth must be >= 2");
    if (crossover_max_depth < creation_max_depth)
        throw std::invalid_argument("crossover_max_depth must be >= creation_max_depth");
    if (tournament_size < 1 || tournament_size > population_size)
        throw std::invalid_argument("tournament_size must be in [1, population_size]");
}

std::string GpConfig::canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "population_size=" << population_size << ";generations=" << generations
       << ";crossover_prob=" << crossover_prob << ";creation_prob=" << creation_prob
       << ";mutation_prob=" << mutation_prob << ";creation_max_depth=" << creation_max_depth
       << ";crossover_max_depth=" << crossover_max_depth << ";tournament_size=" << tournament_size
       << ";normalize=" << normalize << ";rng_seed=" << rng_seed;
    return os.str();
}

double fitness(std::span<const CaseStats> per_case, std::size_t node_count) {
    double sum = 0.0;
    for (const auto& c : per_case) {
        const double term = static_cast<double>(c.conflicts) + static_cast<double>(c.decisions) / 1000.0;
        sum += term * term;
    }
    return std::sqrt(sum) + static_cast<double>(node_count) / 1000.0;
}

const char* to_string(Origin o) {
    switch (o) {
        case Origin::full: return "full";
        case Origin::grow: return "grow";
        case Origin::crossover: return "crossover";
        case Origin::creation: return "creation";
        case Origin::mutation: return "mutation";
        case Origin::copy: return "copy";
        case Origin::loaded: return "loaded";
    }
    return "?";
}

FitnessCase make_fitness_case(std::string name, const Cnf& cnf) {
    BcpResult pre = preprocess_bcp(cnf);
    if (pre.verdict != BcpVerdict::reduced) {
        throw std::invalid_argument("fitness case '" + name + "' is decided by unit propagation (" +
                                    to_string(pre.verdict) + "); a fitness case must require search");
    }
    FitnessCase fc;
    fc.name = std::move(name);
    fc.stats = compute_var_stats(pre.cnf);
    fc.cnf = std::move(pre.cnf);
    return fc;
}

void evaluate(Individual& ind, const FitnessCaseSet& cases, bool normalize_acts) {
    ind.per_case.clear();
    for (const auto& fc : cases.cases) {
        ActivityVector acts = compute_activities(ind.program, fc.cnf, fc.stats);
        if (normalize_acts) acts = normalize(acts);
        const SolveOutcome out = solve(fc.cnf, acts, cases.solver);
        ind.per_case.push_back({out.conflicts, out.decisions});
    }
    ind.node_count = ind.program.node_count();
    ind.fitness = fitness(ind.per_case, ind.node_count);
    ind.evaluated = true;
}

void evaluate_all(std::vector<Individual>& pop, const FitnessCaseSet& cases, bool normalize_acts, std::size_t jobs) {
    jobs = std::max<std::size_t>(1, std::min(jobs, pop.size()));
    if (jobs == 1) {
        for (auto& ind : pop)
            if (!ind.evaluated) evaluate(ind, cases, normalize_acts);
        return;
    }
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < jobs; ++t) {
        workers.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < pop.size(); i += jobs)
                    if (!pop[i].evaluated) evaluate(pop[i], cases, normalize_acts);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

namespace {

void grow_into(std::vector<Op>& out, CreationMethod method, int remaining, bool root, Fragment f, SplitMix64& rng) {
    const auto terms = terminals_for(f);
    const auto funcs = functions();
    Op op;
    if (remaining <= 1) {
        op = terms[rng.below(terms.size())];
    } else if (method == CreationMethod::full || root) {
        op = funcs[rng.below(funcs.size())];
    } else {
        const std::size_t k = rng.below(terms.size() + funcs.size());
        op = k < funcs.size() ? funcs[k] : terms[k - funcs.size()];
    }
    out.push_back(op);
    for (int c = 0; c < arity(op); ++c) grow_into(out, method, remaining - 1, false, f, rng);
}

// Floyd's sampling of k distinct indices from [0, n).
std::vector<std::size_t> sample_distinct(std::size_t n, std::size_t k, SplitMix64& rng) {
    std::vector<std::size_t> picked;
    picked.reserve(k);
    for (std::size_t j = n - k; j < n; ++j) {
        const auto t = static_cast<std::size_t>(rng.below(j + 1));
        if (std::find(picked.begin(), picked.end(), t) == picked.end())
            picked.push_back(t);
        else
            picked.push_back(j);
    }
    return picked;
}

bool better(const std::vector<Individual>& pop, std::size_t a, std::size_t b) {
    return pop[a].fitness < pop[b].fitness || (pop[a].fitness == pop[b].fitness && a < b);
}

// Highest fitness among `size` sampled individuals, never `protect`.
std::size_t inverse_tournament(const std::vector<Individual>& pop, std::size_t size, std::size_t protect,
                               SplitMix64& rng) {
    const std::size_t n = pop.size() - 1;
    const auto picks = sample_distinct(n, std::min(size, n), rng);
    std::size_t loser = pop.size();
    for (std::size_t p : picks) {
        const std::size_t idx = p >= protect ? p + 1 : p;
        if (loser == pop.size() || better(pop, loser, idx)) loser = idx;
    }
    return loser;
}

void mutate(InitProgram& prog, const GpConfig& config, SplitMix64& rng) {
    const Fragment f = kFragments[rng.below(3)];
    const Tree& tree = prog.fragment(f);
    const auto at = static_cast<std::size_t>(rng.below(tree.size()));
    const int depth = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(config.creation_max_depth)));
    const Tree donor = create_tree(CreationMethod::grow, depth, f, rng);
    Tree mutated = tree.splice(at, donor, 0);
    if (mutated.depth() <= config.crossover_max_depth) prog.fragment(f) = std::move(mutated);
}

}  // namespace

Tree create_tree(CreationMethod method, int depth, Fragment f, SplitMix64& rng) {
    std::vector<Op> nodes;
    grow_into(nodes, method, std::max(depth, 1), depth >= 2, f, rng);
    return Tree(std::move(nodes));
}

std::vector<Individual> create_initial_population(const GpConfig& config, SplitMix64& rng) {
    config.validate();
    std::vector<Individual> pop(config.population_size);
    const int ramp = config.creation_max_depth - 1;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const int depth = 2 + static_cast<int>((i / 2) % static_cast<std::size_t>(ramp));
        const CreationMethod method = i % 2 == 0 ? CreationMethod::full : CreationMethod::grow;
        auto& ind = pop[i];
        for (Fragment f : kFragments) ind.program.fragment(f) = create_tree(method, depth, f, rng);
        ind.origin = method == CreationMethod::full ? Origin::full : Origin::grow;
        ind.ramp_depth = depth;
        ind.node_count = ind.program.node_count();
    }
    return pop;
}

std::size_t tournament_select(const std::vector<Individual>& pop, std::size_t size, SplitMix64& rng) {
    const auto picks = sample_distinct(pop.size(), std::min(size, pop.size()), rng);
    std::size_t winner = picks.front();
    for (std::size_t p : picks)
        if (better(pop, p, winner)) winner = p;
    return winner;
}

bool crossover(const InitProgram& mother, const InitProgram& father, Fragment f, int max_depth, SplitMix64& rng,
               InitProgram& child) {
    const Tree& m = mother.fragment(f);
    const Tree& d = father.fragment(f);
    const auto at = static_cast<std::size_t>(rng.below(m.size()));
    const auto from = static_cast<std::size_t>(rng.below(d.size()));
    Tree offspring = m.splice(at, d, from);
    if (offspring.depth() > max_depth) return false;
    child = mother;
    child.fragment(f) = std::move(offspring);
    return true;
}

std::size_t best_index(const std::vector<Individual>& pop) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
        if (better(pop, i, best)) best = i;
    return best;
}

void step_steady_state(std::vector<Individual>& pop, const FitnessCaseSet& cases, const GpConfig& config,
                       SplitMix64& rng, const EventObserver& observer) {
    config.validate();
    if (pop.size() < 2) return;
    std::size_t best = best_index(pop);
    for (std::size_t event = 0; event < pop.size(); ++event) {
        Individual child;
        const double r = rng.uniform();
        if (r < config.crossover_prob) {
            const std::size_t mother = tournament_select(pop, config.tournament_size, rng);
            const std::size_t father = tournament_select(pop, config.tournament_size, rng);
            const Fragment f = kFragments[rng.below(3)];
            if (crossover(pop[mother].program, pop[father].program, f, config.crossover_max_depth, rng,
                          child.program)) {
                child.origin = Origin::crossover;
            } else {
                child = pop[mother];
                child.origin = Origin::copy;
            }
        } else if (r < config.crossover_prob + config.creation_prob) {
            const int depth = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(config.creation_max_depth - 1)));
            const CreationMethod method = rng.coin(0.5) ? CreationMethod::full : CreationMethod::grow;
            for (Fragment f : kFragments) child.program.fragment(f) = create_tree(method, depth, f, rng);
            child.origin = Origin::creation;
            child.ramp_depth = depth;
        } else if (r < config.crossover_prob + config.creation_prob + config.mutation_prob) {
            child.program = pop[tournament_select(pop, config.tournament_size, rng)].program;
            mutate(child.program, config, rng);
            child.origin = Origin::mutation;
        } else {
            child = pop[tournament_select(pop, config.tournament_size, rng)];
            child.origin = Origin::copy;
        }
        if (child.origin != Origin::copy) evaluate(child, cases, config.normalize);

        const std::size_t loser = inverse_tournament(pop, config.tournament_size, best, rng);
        pop[loser] = std::move(child);
        if (better(pop, loser, best)) best = loser;
        if (observer) observer({event, pop[loser].origin, loser, pop[loser].fitness, pop[best].fitness, &pop[loser]});
    }
}

namespace {

GenerationRecord record(std::size_t generation, const std::vector<Individual>& pop) {
    GenerationRecord rec;
    rec.generation = generation;
    const std::size_t b = best_index(pop);
    rec.best_fitness = pop[b].fitness;
    double sum = 0.0;
    for (const auto& ind : pop) sum += ind.fitness;
    rec.mean_fitness = sum / static_cast<double>(pop.size());
    rec.best_nodes = pop[b].node_count;
    rec.best_program = print_program(pop[b].program);
    return rec;
}

}  // namespace

EvolutionResult resume_evolution(std::vector<Individual> population, std::uint64_t rng_state,
                                 std::size_t first_generation, const FitnessCaseSet& cases, const GpConfig& config,
                                 const EventObserver& observer) {
    config.validate();
    if (population.size() != config.population_size)
        throw std::invalid_argument("population size does not match configuration");
    SplitMix64 rng;
    rng.set_state(rng_state);
    evaluate_all(population, cases, config.normalize, config.jobs);
    EvolutionResult result;
    result.log.push_back(record(first_generation, population));
    for (std::size_t g = 1; g <= config.generations; ++g) {
        step_steady_state(population, cases, config, rng, observer);
        result.log.push_back(record(first_generation + g, population));
    }
    result.best = population[best_index(population)];
    result.population = std::move(population);
    result.rng_state = rng.state();
    return result;
}

EvolutionResult run_evolution(const FitnessCaseSet& cases, const GpConfig& config, const EventObserver& observer) {
    config.validate();
    if (cases.cases.empty()) throw std::invalid_argument("at least one fitness case is required");
    SplitMix64 rng(config.rng_seed);
    auto pop = create_initial_population(config, rng);
    return resume_evolution(std::move(pop), rng.state(), 0, cases, config, observer);
}

std::string format_log_csv(const std::vector<GenerationRecord>& log) {
    std::string out = "gen,best_fitness,mean_fitness,best_nodes\n";
    char buf[128];
    for (const auto& r : log) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%zu\n", r.generation, r.best_fitness, r.mean_fitness,
                      r.best_nodes);
        out += buf;
    }
    return out;
}

std::string write_checkpoint(const Checkpoint& ckpt) {
    std::string out = "# satinit population checkpoint\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "generation %zu\nrng_state %" PRIu64 "\npopulation %zu\n", ckpt.generation,
                  ckpt.rng_state, ckpt.population.size());
    out += buf;
    for (std::size_t i = 0; i < ckpt.population.size(); ++i) {
        const auto& ind = ckpt.population[i];
        std::snprintf(buf, sizeof buf, "individual %zu fitness %.17g cases", i, ind.fitness);
        out += buf;
        for (const auto& c : ind.per_case) {
            std::snprintf(buf, sizeof buf, " %" PRIu64 ":%" PRIu64, c.conflicts, c.decisions);
            out += buf;
        }
        out += '\n';
        out += print_program(ind.program);
        out += "\nend\n";
    }
    return out;
}

Checkpoint read_checkpoint(std::string_view text) {
    Checkpoint ckpt;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t expected = 0;
    bool in_block = false;
    std::string block;
    Individual current;
    auto bad = [](const std::string& why) { return std::runtime_error("checkpoint: " + why); };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (in_block) {
            if (line == "end") {
                current.program = parse_program(block);
                current.node_count = current.program.node_count();
                current.origin = Origin::loaded;
                ckpt.population.push_back(std::move(current));
                current = Individual{};
                block.clear();
                in_block = false;
            } else {
                block += line + '\n';
            }
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "generation") {
            ls >> ckpt.generation;
        } else if (key == "rng_state") {
            ls >> ckpt.rng_state;
        } else if (key == "population") {
            ls >> expected;
        } else if (key == "individual") {
            std::size_t idx = 0;
            std::string word;
            ls >> idx >> word;
            if (word != "fitness") throw bad("malformed individual line");
            std::string fit;
            ls >> fit >> word;
            if (word != "cases") throw bad("malformed individual line");
            current.fitness = std::stod(fit);
            std::string pair;
            while (ls >> pair) {
                const auto colon = pair.find(':');
                if (colon == std::string::npos) throw bad("malformed case stats '" + pair + "'");
                current.per_case.push_back(
                    {std::stoull(pair.substr(0, colon)), std::stoull(pair.substr(colon + 1))});
            }
            current.evaluated = !current.per_case.empty();
            in_block = true;
        } else {
            throw bad("unexpected line '" + line + "'");
        }
    }
    if (in_block) throw bad("unterminated individual block");
    if (ckpt.population.size() != expected) throw bad("population count mismatch");
    return ckpt;
}

}  // namespace satinit
