#include "doctest.h"

#include <cmath>
#include <map>

#include "satinit/activity.hpp"
#include "satinit/gp.hpp"
#include "satinit/harness.hpp"

using namespace satinit;

namespace {

FitnessCaseSet small_cases(std::size_t n = 1) {
    FitnessCaseSet set;
    for (std::uint64_t seed = 100; set.cases.size() < n; ++seed) {
        const Cnf cnf = random_ksat(40, 172, 3, seed);
        if (preprocess_bcp(cnf).verdict != BcpVerdict::reduced) continue;
        if (solve_with_baseline(preprocess_bcp(cnf).cnf, set.solver).conflicts == 0) continue;
        set.cases.push_back(make_fitness_case("r" + std::to_string(seed), cnf));
    }
    return set;
}

GpConfig small_config() {
    GpConfig cfg;
    cfg.population_size = 24;
    cfg.generations = 2;
    cfg.tournament_size = 4;
    cfg.rng_seed = 7;
    return cfg;
}

bool fragments_legal(const InitProgram& p) {
    for (Fragment f : kFragments)
        if (!p.fragment(f).legal_in(f)) return false;
    return true;
}

}  // namespace

TEST_CASE("fitness examples") {
    CHECK(std::fabs(fitness(std::vector<CaseStats>{{464, 9231}}, 11) - 473.242) < 1e-9);
    CHECK(fitness(std::vector<CaseStats>{{0, 0}}, 0) == 0.0);
    CHECK(fitness(std::vector<CaseStats>{{3, 0}, {4, 0}}, 0) == 5.0);
}

TEST_CASE("fitness prefers balanced low conflicts") {
    const double balanced = fitness(std::vector<CaseStats>{{10, 0}, {10, 0}}, 0);
    const double skewed = fitness(std::vector<CaseStats>{{1, 0}, {19, 0}}, 0);
    CHECK(balanced < skewed);
    SplitMix64 rng(1);
    for (int i = 0; i < 500; ++i) {
        std::vector<CaseStats> a(1 + rng.below(4));
        for (auto& c : a) c = {rng.below(1000), rng.below(5000)};
        auto b = a;
        b[rng.below(b.size())].conflicts += 1 + rng.below(50);
        const std::size_t l = rng.below(100);
        CHECK(fitness(a, l) <= fitness(b, l));
    }
}

TEST_CASE("make_fitness_case rejects problems decided by propagation") {
    CHECK_THROWS_AS(make_fitness_case("x", parse_dimacs("p cnf 2 2\n1 0\n-1 2 0\n").cnf), std::invalid_argument);
    CHECK_THROWS_AS(make_fitness_case("x", parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").cnf), std::invalid_argument);
}

TEST_CASE("zero program reproduces the baseline and evaluation is deterministic") {
    const FitnessCaseSet cases = small_cases(2);
    Individual zero;
    evaluate(zero, cases, false);
    REQUIRE(zero.per_case.size() == 2);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(zero.per_case[i].conflicts == solve_with_baseline(cases.cases[i].cnf, cases.solver).conflicts);
    CHECK(zero.node_count == 3);

    Individual a;
    a.program = preset("add_lc");
    Individual b = a;
    evaluate(a, cases, true);
    evaluate(b, cases, true);
    CHECK(a.fitness == b.fitness);
    CHECK(std::isfinite(a.fitness));
}

TEST_CASE("GpConfig validation") {
    GpConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.crossover_prob = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = GpConfig{};
    cfg.tournament_size = cfg.population_size + 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = GpConfig{};
    cfg.creation_max_depth = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("create_tree honours depth and method") {
    SplitMix64 rng(4);
    for (int depth = 1; depth <= 6; ++depth) {
        for (Fragment f : kFragments) {
            for (int i = 0; i < 20; ++i) {
                const Tree full = create_tree(CreationMethod::full, depth, f, rng);
                CHECK(full.depth() == depth);
                CHECK(full.legal_in(f));
                // every child of a full tree node is exactly one level shallower
                for (std::size_t k = 0; k < full.size(); ++k) {
                    std::size_t c = k + 1;
                    for (int a = 0; a < arity(full.nodes()[k]); ++a) {
                        CHECK(full.depth_at(c) == full.depth_at(k) - 1);
                        c = full.subtree_end(c);
                    }
                }
                const Tree grow = create_tree(CreationMethod::grow, depth, f, rng);
                CHECK(grow.depth() <= depth);
                CHECK(grow.legal_in(f));
                if (depth >= 2) CHECK_FALSE(is_terminal(grow.root()));
            }
        }
    }
}

TEST_CASE("ramped half-and-half population") {
    GpConfig cfg;
    SplitMix64 rng(11);
    const auto pop = create_initial_population(cfg, rng);
    REQUIRE(pop.size() == 1000);
    std::map<std::pair<int, Origin>, std::size_t> shapes;
    for (const auto& ind : pop) {
        CHECK(fragments_legal(ind.program));
        CHECK(ind.program.max_depth() <= 6);
        CHECK(ind.node_count == ind.program.node_count());
        CHECK_FALSE(ind.evaluated);
        ++shapes[{ind.ramp_depth, ind.origin}];
    }
    for (int d = 2; d <= 6; ++d) {
        CHECK(shapes[{d, Origin::full}] > 0);
        CHECK(shapes[{d, Origin::grow}] > 0);
    }
    SplitMix64 rng2(11);
    const auto again = create_initial_population(cfg, rng2);
    for (std::size_t i = 0; i < pop.size(); ++i) CHECK(again[i].program == pop[i].program);
}

TEST_CASE("tournament selection") {
    std::vector<Individual> pop(10);
    for (std::size_t i = 0; i < pop.size(); ++i) pop[i].fitness = static_cast<double>((i * 7) % 10);
    SplitMix64 rng(2);
    // size equal to the population always finds the minimum
    for (int i = 0; i < 20; ++i) CHECK(tournament_select(pop, 10, rng) == 0);
    pop[3].fitness = 0.0;
    for (int i = 0; i < 20; ++i) CHECK(tournament_select(pop, 10, rng) == 0);
    std::map<std::size_t, int> seen;
    for (int i = 0; i < 2000; ++i) ++seen[tournament_select(pop, 1, rng)];
    CHECK(seen.size() == 10);
}

TEST_CASE("crossover stays within the fragment and depth limit") {
    SplitMix64 rng(13);
    for (int i = 0; i < 300; ++i) {
        InitProgram mother, father;
        for (Fragment f : kFragments) {
            mother.fragment(f) = create_tree(CreationMethod::grow, 6, f, rng);
            father.fragment(f) = create_tree(CreationMethod::full, 6, f, rng);
        }
        const Fragment f = kFragments[rng.below(3)];
        InitProgram child = mother;
        if (crossover(mother, father, f, 8, rng, child)) {
            CHECK(fragments_legal(child));
            CHECK(child.fragment(f).depth() <= 8);
            for (Fragment g : kFragments)
                if (g != f) CHECK(child.fragment(g) == mother.fragment(g));
        } else {
            CHECK(child == mother);
        }
    }
}

TEST_CASE("evolution is deterministic, elitist and jobs-independent") {
    const FitnessCaseSet cases = small_cases();
    GpConfig cfg = small_config();
    std::size_t events = 0;
    const auto r1 = run_evolution(cases, cfg, [&](const ReplacementEvent& e) {
        ++events;
        CHECK(e.child_fitness >= 0.0);
    });
    CHECK(events == cfg.population_size * cfg.generations);
    REQUIRE(r1.log.size() == cfg.generations + 1);
    for (std::size_t g = 1; g < r1.log.size(); ++g) CHECK(r1.log[g].best_fitness <= r1.log[g - 1].best_fitness);
    for (const auto& ind : r1.population) {
        CHECK(fragments_legal(ind.program));
        CHECK(ind.program.max_depth() <= cfg.crossover_max_depth);
        CHECK(ind.evaluated);
    }

    cfg.jobs = 3;
    const auto r2 = run_evolution(cases, cfg);
    CHECK(r2.best.fitness == r1.best.fitness);
    CHECK(r2.best.program == r1.best.program);
    CHECK(r2.rng_state == r1.rng_state);
    CHECK(format_log_csv(r2.log) == format_log_csv(r1.log));

    // re-evaluating the reported best reproduces its fitness
    Individual again;
    again.program = r1.best.program;
    evaluate(again, cases, cfg.normalize);
    CHECK(again.fitness == r1.best.fitness);
}

TEST_CASE("zero generations evaluates the initial population only") {
    const FitnessCaseSet cases = small_cases();
    GpConfig cfg = small_config();
    cfg.generations = 0;
    const auto r = run_evolution(cases, cfg);
    CHECK(r.log.size() == 1);
    CHECK(r.log[0].generation == 0);
    CHECK(r.best.fitness == r.population[best_index(r.population)].fitness);
}

TEST_CASE("log csv format") {
    std::vector<GenerationRecord> log{{0, 12.5, 20.25, 7, "x"}};
    CHECK(format_log_csv(log) == "gen,best_fitness,mean_fitness,best_nodes\n0,12.500000,20.250000,7\n");
}

TEST_CASE("checkpoint round trip and resume") {
    const FitnessCaseSet cases = small_cases();
    GpConfig cfg = small_config();
    cfg.generations = 1;
    const auto first = run_evolution(cases, cfg);

    const Checkpoint ckpt{1, first.rng_state, first.population};
    const Checkpoint back = read_checkpoint(write_checkpoint(ckpt));
    CHECK(back.generation == 1);
    CHECK(back.rng_state == first.rng_state);
    REQUIRE(back.population.size() == first.population.size());
    for (std::size_t i = 0; i < back.population.size(); ++i) {
        CHECK(back.population[i].program == first.population[i].program);
        CHECK(back.population[i].fitness == first.population[i].fitness);
        CHECK(back.population[i].per_case == first.population[i].per_case);
    }

    const auto resumed = resume_evolution(back.population, back.rng_state, back.generation, cases, cfg);
    cfg.generations = 2;
    const auto straight = run_evolution(cases, cfg);
    CHECK(resumed.best.program == straight.best.program);
    CHECK(resumed.best.fitness == straight.best.fitness);
    CHECK(resumed.rng_state == straight.rng_state);

    CHECK_THROWS(read_checkpoint("garbage"));
}
