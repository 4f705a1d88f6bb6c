#pragma once

// Random program generators for property tests.

#include <set>
#include <vector>

#include "satinit/gp.hpp"
#include "satinit/program.hpp"

namespace testgen {

// A fragment tree that uses every function once and every terminal legal
// for the fragment at least once: each function gets random legal
// terminals (cycled so all appear) as arguments, chained with progn2.
inline satinit::Tree kitchen_sink(satinit::Fragment f, satinit::SplitMix64& rng) {
    using namespace satinit;
    const auto terms = terminals_for(f);
    std::vector<Op> order(functions().begin(), functions().end());
    rng.shuffle(order);
    std::size_t next_term = rng.below(terms.size());
    std::vector<std::vector<Op>> items;
    for (Op fn : order) {
        std::vector<Op> item{fn};
        for (int a = 0; a < arity(fn); ++a) item.push_back(terms[next_term++ % terms.size()]);
        items.push_back(std::move(item));
    }
    while (next_term % terms.size() != 0 || next_term < terms.size()) items.push_back({terms[next_term++ % terms.size()]});
    // right-nested progn2 chain
    std::vector<Op> prefix;
    for (std::size_t i = 0; i + 1 < items.size(); ++i) {
        prefix.push_back(Op::progn2);
        prefix.insert(prefix.end(), items[i].begin(), items[i].end());
    }
    prefix.insert(prefix.end(), items.back().begin(), items.back().end());
    return Tree(std::move(prefix));
}

inline satinit::InitProgram random_program(satinit::SplitMix64& rng, int max_depth = 5) {
    using namespace satinit;
    InitProgram p;
    for (Fragment f : kFragments) {
        const int depth = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_depth)));
        const auto method = rng.coin(0.5) ? CreationMethod::full : CreationMethod::grow;
        p.fragment(f) = create_tree(method, depth, f, rng);
    }
    return p;
}

inline std::set<satinit::Op> ops_used(const satinit::InitProgram& p) {
    std::set<satinit::Op> used;
    for (auto f : satinit::kFragments)
        for (auto op : p.fragment(f).nodes()) used.insert(op);
    return used;
}

}  // namespace testgen
