#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "satinit/cnf.hpp"
#include "satinit/program.hpp"
#include "satinit/rng.hpp"
#include "satinit/solver.hpp"

namespace satinit {

struct GpConfig {
    std::size_t population_size = 1000;
    std::size_t generations = 5;
    double crossover_prob = 0.95;
    double creation_prob = 0.02;
    double mutation_prob = 0.0;
    int creation_max_depth = 6;
    int crossover_max_depth = 17;
    std::size_t tournament_size = 10;
    bool normalize = false;
    std::size_t jobs = 1;
    std::uint64_t rng_seed = 1;

    void validate() const;
    std::string canonical() const;
};

struct CaseStats {
    std::uint64_t conflicts = 0;
    std::uint64_t decisions = 0;
    friend bool operator==(const CaseStats&, const CaseStats&) = default;
};

/// sqrt(sum_i (c_i + d_i/1000)^2) + l/1000. Lower is better.
double fitness(std::span<const CaseStats> per_case, std::size_t node_count);

enum class Origin : std::uint8_t { full, grow, crossover, creation, mutation, copy, loaded };
const char* to_string(Origin o);

struct Individual {
    InitProgram program;
    double fitness = 0.0;
    std::vector<CaseStats> per_case;
    std::size_t node_count = 0;
    Origin origin = Origin::full;
    int ramp_depth = 0;
    bool evaluated = false;
};

struct FitnessCase {
    std::string name;
    Cnf cnf;  // preprocessed, verdict `reduced`
    VarStats stats;
};

struct FitnessCaseSet {
    std::vector<FitnessCase> cases;
    SolverConfig solver;
};

/// Preprocesses `cnf` and wraps it as a fitness case. Throws std::invalid_argument
/// when unit propagation alone decides the problem (a case must need search).
FitnessCase make_fitness_case(std::string name, const Cnf& cnf);

/// Computes activities (optionally normalized) for every case, solves, and sets fitness.
void evaluate(Individual& ind, const FitnessCaseSet& cases, bool normalize);

/// Evaluates all unevaluated individuals, using up to `jobs` threads. The
/// result does not depend on `jobs`.
void evaluate_all(std::vector<Individual>& pop, const FitnessCaseSet& cases, bool normalize, std::size_t jobs);

enum class CreationMethod { full, grow };

/// Random tree for a fragment. `full` places every leaf at exactly `depth`;
/// `grow` picks uniformly among functions and terminals below the limit, with
/// a function at the root when depth >= 2.
Tree create_tree(CreationMethod method, int depth, Fragment f, SplitMix64& rng);

/// Ramped half-and-half: individual i uses depth 2 + (i/2) mod (max_depth - 1)
/// and method full for even i, grow for odd i. Individuals are not evaluated.
std::vector<Individual> create_initial_population(const GpConfig& config, SplitMix64& rng);

/// Sampling without replacement; the lowest fitness wins, ties go to the lower index.
std::size_t tournament_select(const std::vector<Individual>& pop, std::size_t size, SplitMix64& rng);

/// Subtree crossover within one fragment. Returns false (and leaves `child`
/// untouched) if the offspring exceeds `max_depth`.
bool crossover(const InitProgram& mother, const InitProgram& father, Fragment f, int max_depth, SplitMix64& rng,
               InitProgram& child);

struct ReplacementEvent {
    std::size_t event = 0;
    Origin origin = Origin::copy;
    std::size_t replaced = 0;
    double child_fitness = 0.0;
    double best_fitness = 0.0;
    const Individual* child = nullptr;  // valid only during the callback
};

using EventObserver = std::function<void(const ReplacementEvent&)>;

/// One generation: population_size steady-state replacement events. Each
/// child replaces the loser of an inverse tournament; the current best is
/// never replaced. `observer` sees each event.
void step_steady_state(std::vector<Individual>& pop, const FitnessCaseSet& cases, const GpConfig& config,
                       SplitMix64& rng, const EventObserver& observer = {});

std::size_t best_index(const std::vector<Individual>& pop);

struct GenerationRecord {
    std::size_t generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    std::size_t best_nodes = 0;
    std::string best_program;
};

struct EvolutionResult {
    Individual best;
    std::vector<GenerationRecord> log;
    std::vector<Individual> population;
    std::uint64_t rng_state = 0;
};

/// Creates and evaluates the initial population (generation 0), then runs
/// `generations` steady-state generations.
EvolutionResult run_evolution(const FitnessCaseSet& cases, const GpConfig& config,
                              const EventObserver& observer = {});

/// Continues from a saved population and RNG state for `config.generations`
/// more generations; generation numbering starts at `first_generation`.
EvolutionResult resume_evolution(std::vector<Individual> population, std::uint64_t rng_state,
                                 std::size_t first_generation, const FitnessCaseSet& cases, const GpConfig& config,
                                 const EventObserver& observer = {});

std::string format_log_csv(const std::vector<GenerationRecord>& log);

// Checkpoint: population in program text form plus the RNG state.
struct Checkpoint {
    std::size_t generation = 0;
    std::uint64_t rng_state = 0;
    std::vector<Individual> population;
};
std::string write_checkpoint(const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::string_view text);

}  // namespace satinit
