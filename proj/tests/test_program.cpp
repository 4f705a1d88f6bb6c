#include "doctest.h"

#include <cmath>

#include "satinit/gp.hpp"
#include "satinit/program.hpp"

using namespace satinit;

namespace {

double eval_text(std::string_view text, Registers& regs, const EvalContext& ctx = {}) {
    return eval_tree(parse_tree(text, Fragment::in), ctx, regs);
}

double eval_text(std::string_view text) {
    Registers regs;
    return eval_text(text, regs);
}

}  // namespace

TEST_CASE("op table") {
    CHECK(arity(Op::add) == 1);
    CHECK(arity(Op::progn2) == 2);
    CHECK(arity(Op::pdiv) == 2);
    CHECK(arity(Op::if_) == 3);
    CHECK(arity(Op::lc) == 0);
    CHECK(is_loop_only(Op::il));
    CHECK_FALSE(is_loop_only(Op::v2));
    CHECK(terminals_for(Fragment::pre).size() == 13);
    CHECK(terminals_for(Fragment::in).size() == 21);
    CHECK(functions().size() == 27);
    for (Op t : terminals_for(Fragment::post)) CHECK_FALSE(is_loop_only(t));
}

TEST_CASE("tree structure helpers") {
    const Tree t = parse_tree("if(sub(xp), cs, inv(4))", Fragment::in);
    CHECK(t.size() == 6);
    CHECK(t.depth() == 3);
    CHECK(t.subtree_end(1) == 3);
    CHECK(t.depth_at(1) == 2);
    CHECK(Tree{}.depth() == 1);
    CHECK_THROWS_AS(Tree(std::vector<Op>{Op::add}), std::invalid_argument);
    CHECK_THROWS_AS(Tree(std::vector<Op>{Op::c1, Op::c2}), std::invalid_argument);

    const Tree donor = parse_tree("max(lc, 2)", Fragment::in);
    const Tree spliced = t.splice(2, donor, 0);
    CHECK(print_tree(spliced) == "if(sub(max(lc, 2)), cs, inv(4))");
}

TEST_CASE("parse_program: single fragment with defaults") {
    const auto p = parse_program("IN: sub(xp)");
    CHECK(print_tree(p.in) == "sub(xp)");
    CHECK(p.pre == Tree{});
    CHECK(p.post == Tree{});
    CHECK(p.node_count() == 4);
}

TEST_CASE("parse_program: assignment-style listings") {
    const auto p = parse_program(" PRE_LOOP_CODE = neg (4)\n  IN_LOOP_CODE = if (sub (xp), cs, inv (4))\n"
                                 "POST_LOOP_CODE = exp (neg (xc))\n");
    CHECK(print_program(p) == "PRE: neg(4)\nIN: if(sub(xp), cs, inv(4))\nPOST: exp(neg(xc))");
    CHECK(p.node_count() == 11);

    const auto best = parse_program("PRE_LOOP_CODE = {}\nIN_LOOP_CODE = add (lc)\nPOST_LOOP_CODE = {}");
    CHECK(best == preset("add_lc"));
}

TEST_CASE("parse_program: sequences and infix") {
    const auto p = parse_program("PRE: set(xn) / IN: div(lp) / POST: add(1)");
    CHECK(print_program(p) == "PRE: set(xn)\nIN: div(lp)\nPOST: add(1)");
    CHECK(parse_program(print_program(p)) == p);

    const auto seq = parse_program("POST: sub(xn), mul(2), sub(xc)");
    CHECK(seq.post.root() == Op::progn3);
    CHECK(print_tree(seq.post) == "sub(xn), mul(2), sub(xc)");

    const auto two = parse_program("IN: set(3),div(2)");
    CHECK(two.in.root() == Op::progn2);

    const auto cont = parse_program("IN: setv2(set(xp)),\n    if(lessthan(ln,v2),0,mul(il))");
    CHECK(print_tree(cont.in) == "setv2(set(xp)), if(lessthan(ln, v2), 0, mul(il))");

    const auto infix = parse_program("POST: if(xor(v2,a0)%add(v1),0,sub(xc))");
    CHECK(print_tree(infix.post) == "if(xor(v2, a0)%add(v1), 0, sub(xc))");

    CHECK(print_tree(preset("precursor").in) == "add(exp(neg(lc))-lp)");
    CHECK(print_tree(parse_tree("add(ln+xs+1)", Fragment::in)) == "add(ln+xs+1)");
    CHECK(print_tree(parse_tree("1-(2-3)", Fragment::in)) == "1-(2-3)");
    CHECK(print_tree(parse_tree("(1+2)*3", Fragment::in)) == "(1+2)*3");
    CHECK(print_tree(parse_tree("1+2*3", Fragment::in)) == "1+2*3");
}

TEST_CASE("long sequences nest and print back flat") {
    const Tree t = parse_tree("add(1), add(2), add(3), add(4), add(0)", Fragment::pre);
    CHECK(print_tree(t) == "add(1), add(2), add(3), add(4), add(0)");
    Registers r;
    eval_tree(t, {}, r);
    CHECK(r.a0 == 10.0);
    // progn nested in a non-tail position stays explicit
    const Tree u = parse_tree("progn3(1, progn2(2, 3), 4)", Fragment::pre);
    CHECK(print_tree(u) == "1, progn2(2, 3), 4");
    CHECK(parse_tree(print_tree(u), Fragment::pre) == u);
    const Tree w = parse_tree("progn2(1, progn2(2, 3))", Fragment::pre);
    CHECK(parse_tree(print_tree(w), Fragment::pre) == w);
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_program("PRE: add(ls)"), ProgramParseError);
    CHECK_THROWS_AS(parse_program("POST: lc"), ProgramParseError);
    CHECK_THROWS_AS(parse_program("IN: foo(1)"), ProgramParseError);
    CHECK_THROWS_AS(parse_program("IN: add(1, 2)"), ProgramParseError);
    CHECK_THROWS_AS(parse_program("IN: if(1, 2)"), ProgramParseError);
    CHECK_THROWS_AS(parse_program("IN: add"), ProgramParseError);
    CHECK_THROWS_AS(parse_program("IN: xp(1)"), ProgramParseError);
    CHECK_THROWS_AS(parse_program("IN: 5"), ProgramParseError);
    CHECK_THROWS_AS(parse_program("IN: add(1) extra"), ProgramParseError);
    CHECK_THROWS_AS(parse_program("IN: 1 / IN: 2"), ProgramParseError);
    CHECK_THROWS_AS(parse_program("add(1)"), ProgramParseError);
    CHECK_THROWS_AS(parse_program(""), ProgramParseError);
    try {
        parse_program("PRE: add(ls)");
    } catch (const ProgramParseError& e) {
        CHECK(std::string(e.what()).find("only available in the IN fragment") != std::string::npos);
    }
}

TEST_CASE("print/parse identity on random trees") {
    SplitMix64 rng(99);
    for (int i = 0; i < 300; ++i) {
        InitProgram p;
        for (Fragment f : kFragments)
            p.fragment(f) = create_tree(i % 2 ? CreationMethod::grow : CreationMethod::full, 2 + i % 5, f, rng);
        const std::string text = print_program(p);
        const InitProgram back = parse_program(text);
        CHECK(back == p);
        CHECK(print_program(back) == text);
    }
}

TEST_CASE("presets") {
    CHECK(preset("zero") == InitProgram{});
    CHECK(print_tree(preset("sub_xp").in) == "sub(xp)");
    CHECK(preset_names().size() == 4);
    CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
}

TEST_CASE("protected division and clamping") {
    Registers r;
    r.a0 = 5;
    CHECK(eval_text("div(0)", r) == kLimit);
    CHECK(r.a0 == kLimit);
    r.a0 = -5;
    CHECK(eval_text("div(0)", r) == -kLimit);
    CHECK(eval_text("exp(4*4*4)") == kLimit);
    CHECK(eval_text("neg(exp(4*4*4))") == -kLimit);
    CHECK(eval_text("inv(0)") == kLimit);
    CHECK(protected_div(1, 1e-10) == kLimit);
    CHECK(protected_div(1, -1e-10) == kLimit);
    CHECK(protected_div(-1, -1e-10) == -kLimit);
    CHECK(protected_div(0, 0) == kLimit);
    CHECK(protected_div(6, 3) == 2);
    CHECK(eval_text("log(0)") == -kLimit);
    CHECK(eval_text("log(neg(1))") == -kLimit);
    CHECK(eval_text("log(1)") == 0.0);
    CHECK(eval_text("sqrt(neg(1))") == -1.0);
    CHECK(eval_text("sqrt(4)") == 2.0);
    CHECK(eval_text("4%0") == kLimit);
    CHECK(eval_text("neg(4)%0") == -kLimit);
    CHECK(eval_text("3%2") == 1.5);

    Registers big;
    EvalContext ctx;
    ctx.nc = 5e6;
    CHECK(eval_tree(parse_tree("set(nc)", Fragment::pre), ctx, big) == kLimit);
    CHECK(eval_tree(parse_tree("mul(nc), mul(nc)", Fragment::pre), ctx, big) == kLimit);
    CHECK(eval_tree(parse_tree("setv1(nc*nc)", Fragment::pre), ctx, big) == kLimit);
    CHECK(big.v1 == kLimit);
}

TEST_CASE("function semantics") {
    CHECK(eval_text("sgn(neg(3))") == -1.0);
    CHECK(eval_text("sgn(0)") == 0.0);
    CHECK(eval_text("sgn(2)") == 1.0);
    CHECK(eval_text("abs(neg(3))") == 3.0);
    CHECK(eval_text("min(3, 1)") == 1.0);
    CHECK(eval_text("max(3, 1)") == 3.0);
    CHECK(eval_text("and(1, 2)") == 1.0);
    CHECK(eval_text("and(1, 0)") == 0.0);
    CHECK(eval_text("or(0, neg(1))") == 0.0);
    CHECK(eval_text("or(0, 1)") == 1.0);
    CHECK(eval_text("xor(1, 0)") == 1.0);
    CHECK(eval_text("xor(1, 1)") == 0.0);
    CHECK(eval_text("xor(0, 0)") == 0.0);
    CHECK(eval_text("lessthan(1, 2)") == 1.0);
    CHECK(eval_text("lessthan(2, 2)") == 0.0);
    CHECK(eval_text("progn2(1, 2)") == 2.0);
    CHECK(eval_text("progn3(1, 2, 3)") == 3.0);
    CHECK(eval_text("1+2*3-4") == 3.0);
    CHECK(eval_text("inv(4)") == 0.25);
    CHECK(eval_text("exp(0)") == 1.0);

    Registers r;
    CHECK(eval_text("add(3), mul(2), sub(1)", r) == 5.0);
    CHECK(r.a0 == 5.0);
    CHECK(eval_text("setv1(2), setv2(v1+1), set(v1*v2)", r) == 6.0);
    CHECK(r == Registers{6.0, 2.0, 3.0});
    CHECK(eval_text("a0", r) == 6.0);
}

TEST_CASE("if evaluates exactly one branch") {
    Registers r;
    CHECK(eval_text("if(lessthan(1, 2), 3, set(4))", r) == 3.0);
    CHECK(r.a0 == 0.0);
    CHECK(eval_text("if(0, set(1), setv1(2))", r) == 2.0);
    CHECK(r == Registers{0.0, 2.0, 0.0});
    CHECK(eval_text("if(setv2(neg(1)), 3, 4)", r) == 4.0);
    CHECK(r.v2 == -1.0);
}

TEST_CASE("side-effect-free trees leave registers untouched") {
    SplitMix64 rng(5);
    int checked = 0;
    for (int i = 0; i < 500; ++i) {
        const Tree t = create_tree(CreationMethod::grow, 5, Fragment::in, rng);
        if (t.has_side_effect()) continue;
        Registers r{1.5, -2.0, 3.0};
        EvalContext ctx{1, 2, 3, 4, 5, 6, 7, 8, 9, 1, 0, 2, 1};
        eval_tree(t, ctx, r);
        CHECK(r == Registers{1.5, -2.0, 3.0});
        ++checked;
    }
    CHECK(checked > 20);
}
