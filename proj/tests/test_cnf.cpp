#include "doctest.h"

#include "oracle.hpp"
#include "satinit/cnf.hpp"
#include "satinit/harness.hpp"
#include "satinit/rng.hpp"

using namespace satinit;

namespace {

Cnf make(std::uint32_t nv, std::vector<std::vector<long>> clauses) {
    Cnf cnf;
    cnf.num_vars = nv;
    for (const auto& c : clauses) {
        Clause clause;
        for (long l : c) clause.push_back(Literal::from_dimacs(l));
        cnf.clauses.push_back(clause);
    }
    return cnf;
}

}  // namespace

TEST_CASE("parse_dimacs reads a small instance") {
    const auto r = parse_dimacs("p cnf 2 2\n1 2 0\n-1 2 0\n");
    CHECK(r.cnf == make(2, {{1, 2}, {-1, 2}}));
    CHECK(r.warnings.empty());
}

TEST_CASE("parse_dimacs drops tautologies and merges duplicates") {
    const auto r = parse_dimacs("p cnf 1 1\n1 -1 0\n");
    CHECK(r.cnf.num_vars == 1);
    CHECK(r.cnf.clauses.empty());
    CHECK(r.tautologies_dropped == 1);

    const auto d = parse_dimacs("p cnf 3 1\n1 2 1 -3 2 0\n");
    CHECK(d.cnf == make(3, {{1, 2, -3}}));
    CHECK(d.duplicate_literals_removed == 2);
}

TEST_CASE("parse_dimacs accepts CRLF, comments, multi-line clauses and SATLIB trailer") {
    const auto r = parse_dimacs("c hello\r\np cnf 3 2\r\n1 -2\r\n 3 0 -1\n0\n%\n0\n");
    CHECK(r.cnf == make(3, {{1, -2, 3}, {-1}}));
    CHECK(r.warnings.empty());
}

TEST_CASE("parse_dimacs warns on clause count mismatch") {
    const auto r = parse_dimacs("p cnf 2 5\n1 2 0\n");
    CHECK(r.cnf.clauses.size() == 1);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("declares 5") != std::string::npos);
}

TEST_CASE("parse_dimacs errors name the line") {
    try {
        parse_dimacs("p cnf 3 1\n4 0\n");
        FAIL("expected error");
    } catch (const DimacsError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("variable 4 exceeds declared 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_dimacs("p cnf x 1\n"), DimacsError);
    CHECK_THROWS_AS(parse_dimacs("p sat 3 1\n"), DimacsError);
    CHECK_THROWS_AS(parse_dimacs("1 2 0\n"), DimacsError);
    CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 a 0\n"), DimacsError);
    CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\np cnf 3 1\n"), DimacsError);
    CHECK_THROWS_AS(parse_dimacs("c only comments\n"), DimacsError);
}

TEST_CASE("write/parse round trip on random instances") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Cnf cnf = random_ksat(12, 40, 3, seed);
        const auto back = parse_dimacs(write_dimacs(cnf, "round trip"));
        CHECK(back.cnf == cnf);
        CHECK(back.warnings.empty());
    }
}

TEST_CASE("compute_var_stats") {
    const auto s = compute_var_stats(make(2, {{1, 2}, {-1, 2}}));
    CHECK(s.xn(1) == 1);
    CHECK(s.xp(1) == 1);
    CHECK(s.xc(1) == 2);
    CHECK(s.xn(2) == 0);
    CHECK(s.xp(2) == 2);
    CHECK(s.xc(2) == 2);

    const auto z = compute_var_stats(make(3, {}));
    for (std::uint32_t v = 1; v <= 3; ++v) CHECK(z.xc(v) == 0);
}

TEST_CASE("compute_var_stats matches a naive recount on random CNFs") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SplitMix64 rng(seed);
        const auto nv = static_cast<std::uint32_t>(3 + rng.below(30));
        const auto k = static_cast<std::uint32_t>(1 + rng.below(std::min<std::uint64_t>(nv, 5)));
        const Cnf cnf = random_ksat(nv, rng.below(80), k, seed * 7 + 1);
        const auto stats = compute_var_stats(cnf);
        const auto naive = oracle::recount(cnf);
        CHECK(stats.negative == naive.xn);
        CHECK(stats.positive == naive.xp);
        std::size_t total = 0;
        for (std::uint32_t v = 1; v <= nv; ++v) total += stats.xc(v);
        CHECK(total == cnf.num_literals());
    }
}

TEST_CASE("preprocess_bcp verdicts") {
    const auto chain = preprocess_bcp(make(3, {{1}, {-1, 2}, {-2, 3}}));
    CHECK(chain.verdict == BcpVerdict::satisfied);
    CHECK(chain.forced == std::vector<Literal>{{1, false}, {2, false}, {3, false}});
    CHECK(chain.cnf.clauses.empty());

    const auto contra = preprocess_bcp(make(1, {{1}, {-1}}));
    CHECK(contra.verdict == BcpVerdict::unsatisfiable);
    REQUIRE(contra.cnf.clauses.size() == 1);
    CHECK(contra.cnf.clauses[0].empty());

    const auto reduced = preprocess_bcp(make(4, {{1}, {-1, 2, 3}, {2, 4}, {1, 4}}));
    CHECK(reduced.verdict == BcpVerdict::reduced);
    CHECK(reduced.cnf == make(4, {{2, 3}, {2, 4}}));

    CHECK(preprocess_bcp(make(2, {{}})).verdict == BcpVerdict::unsatisfiable);
    CHECK(preprocess_bcp(make(2, {})).verdict == BcpVerdict::satisfied);
}

TEST_CASE("preprocess_bcp is idempotent and equisatisfiable") {
    std::size_t reduced_seen = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SplitMix64 rng(seed + 1000);
        const auto nv = static_cast<std::uint32_t>(2 + rng.below(15));
        Cnf cnf = random_ksat(nv, 2 + rng.below(4 * nv), std::min<std::uint32_t>(3, nv), seed);
        // sprinkle unit and binary clauses so propagation has work to do
        for (int u = 0; u < 3; ++u) {
            const auto v = static_cast<std::uint32_t>(1 + rng.below(nv));
            cnf.clauses.push_back({{v, rng.coin(0.5)}});
        }
        const auto once = preprocess_bcp(cnf);
        const auto twice = preprocess_bcp(once.cnf);
        if (once.verdict == BcpVerdict::reduced) {
            ++reduced_seen;
            CHECK(twice.verdict == BcpVerdict::reduced);
            CHECK(twice.cnf == once.cnf);
            CHECK(twice.forced.empty());
        } else {
            CHECK(twice.verdict == once.verdict);
        }
        const bool original_sat = oracle::is_sat(cnf);
        const bool reduced_sat = once.verdict == BcpVerdict::satisfied ||
                                 (once.verdict == BcpVerdict::reduced && oracle::is_sat(once.cnf));
        CHECK(original_sat == reduced_sat);
    }
    CHECK(reduced_seen > 20);
}

TEST_CASE("reorder is deterministic and invertible") {
    const Cnf cnf = random_ksat(30, 100, 3, 5);
    const auto a = reorder(cnf, 42);
    const auto b = reorder(cnf, 42);
    CHECK(write_dimacs(a.cnf) == write_dimacs(b.cnf));
    CHECK(a.mapping.serialize() == b.mapping.serialize());
    CHECK(write_dimacs(reorder(cnf, 43).cnf) != write_dimacs(a.cnf));

    CHECK(unapply_mapping(a.cnf, a.mapping) == cnf);
    CHECK(a.cnf.num_vars == cnf.num_vars);
    REQUIRE(a.cnf.clauses.size() == cnf.clauses.size());
    for (std::size_t i = 0; i < cnf.clauses.size(); ++i)
        CHECK(a.cnf.clauses[a.mapping.clause_to_new[i]].size() == cnf.clauses[i].size());

    const auto parsed = ReorderMapping::parse(a.mapping.serialize());
    CHECK(parsed == a.mapping);

    std::size_t inverted = 0;
    for (bool b2 : a.mapping.inverted) inverted += b2;
    CHECK(inverted > 0);
    CHECK(inverted < cnf.num_vars);
}

TEST_CASE("identity mapping leaves the CNF unchanged") {
    const Cnf cnf = random_ksat(10, 30, 3, 9);
    CHECK(apply_mapping(cnf, ReorderMapping::identity(cnf)) == cnf);
}

TEST_CASE("reorder preserves satisfiability and maps models back") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto nv = static_cast<std::uint32_t>(4 + seed % 13);
        const Cnf cnf = random_ksat(nv, static_cast<std::size_t>(nv * 4.3), 3, seed + 77);
        const auto r = reorder(cnf, seed * 31 + 3);
        const auto m1 = oracle::brute_force_sat(cnf);
        const auto m2 = oracle::brute_force_sat(r.cnf);
        CHECK(m1.has_value() == m2.has_value());
        if (m2) CHECK(satisfies(cnf, map_model_back(*m2, r.mapping)));
    }
}

TEST_CASE("ReorderMapping::parse rejects malformed input") {
    CHECK_THROWS_AS(ReorderMapping::parse("v 1 2\n"), DimacsError);
    CHECK_THROWS_AS(ReorderMapping::parse("v 2 1 0\n"), DimacsError);
    CHECK_THROWS_AS(ReorderMapping::parse("x 1 2 0\n"), DimacsError);
}
