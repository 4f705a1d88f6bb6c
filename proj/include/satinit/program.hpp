#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace satinit {

// Node kinds of the initialization-program language. Terminals first.
enum class Op : std::uint8_t {
    // constants
    c0, c1, c2, c3, c4,
    // available in every fragment
    xn, xp, xc, nv, nc, a0, v1, v2,
    // loop-only
    ln, lp, lc, cs, xs, ls, ic, il,
    // arity 1, with side effects
    add, sub, mul, div, set, setv1, setv2,
    // arity 1, pure
    inv, neg, exp, log, sgn, sqrt, abs,
    // arity 2
    progn2, min, max, and_, or_, xor_, lessthan, plus, minus, times, pdiv,
    // arity 3
    progn3, if_,
};

inline constexpr std::size_t kNumOps = static_cast<std::size_t>(Op::if_) + 1;

enum class Fragment : std::uint8_t { pre, in, post };
inline constexpr std::array<Fragment, 3> kFragments{Fragment::pre, Fragment::in, Fragment::post};
const char* fragment_label(Fragment f);

int arity(Op op);
bool is_terminal(Op op);
bool is_loop_only(Op op);
bool has_side_effect(Op op);
bool legal_in(Op op, Fragment f);
/// Canonical name used by the text format ("add", "xor", "0", ...). Infix
/// operators plus/minus/times/pdiv print as `+ - * %`.
std::string_view op_name(Op op);

std::span<const Op> terminals_for(Fragment f);
std::span<const Op> functions();

/// Expression tree stored as a prefix (pre-order) sequence of node kinds; the
/// subtree rooted at position i occupies [i, subtree_end(i)).
class Tree {
public:
    Tree() : nodes_{Op::c0} {}
    explicit Tree(std::vector<Op> prefix);  // throws std::invalid_argument if not a single well-formed tree

    static Tree terminal(Op op) { return Tree(std::vector<Op>{op}); }

    std::span<const Op> nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    Op root() const { return nodes_.front(); }

    std::size_t subtree_end(std::size_t i) const;
    /// Depth in nodes: a lone terminal has depth 1.
    int depth() const;
    int depth_at(std::size_t i) const;
    bool legal_in(Fragment f) const;
    bool has_side_effect() const;

    /// Copy with the subtree at `at` replaced by `donor`'s subtree at `from`.
    Tree splice(std::size_t at, const Tree& donor, std::size_t from) const;

    friend bool operator==(const Tree&, const Tree&) = default;

private:
    std::vector<Op> nodes_;
};

/// Three program fragments: run once before the clause loop, once per
/// (clause containing X, other literal L) pair, and once after the loop.
struct InitProgram {
    Tree pre;
    Tree in;
    Tree post;

    const Tree& fragment(Fragment f) const { return f == Fragment::pre ? pre : f == Fragment::in ? in : post; }
    Tree& fragment(Fragment f) { return f == Fragment::pre ? pre : f == Fragment::in ? in : post; }
    std::size_t node_count() const { return pre.size() + in.size() + post.size(); }
    int max_depth() const;
    bool well_formed() const;

    friend bool operator==(const InitProgram&, const InitProgram&) = default;
};

class ProgramParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses `PRE: <seq>`, `IN: <seq>`, `POST: <seq>` fragments separated by
/// newlines or ` / `. Labels `PRE_LOOP_CODE = ...` etc. and `{}` (empty) are
/// also accepted. A missing fragment defaults to `0`. Within a fragment a
/// comma-separated sequence is sugar for progn2/progn3; `+ - * %` are infix
/// (`%` is protected division), unary `-` is neg.
InitProgram parse_program(std::string_view text);
Tree parse_tree(std::string_view text, Fragment f);

std::string print_tree(const Tree& tree);
/// Canonical three-line form `PRE: ...\nIN: ...\nPOST: ...`.
std::string print_program(const InitProgram& prog);

/// Built-in programs: zero, add_lc, sub_xp, precursor.
InitProgram preset(std::string_view name);
std::vector<std::string_view> preset_names();

// ---- evaluation ----

inline constexpr double kLimit = 1e6;
inline constexpr double kDivEpsilon = 1e-9;

inline double clamp_value(double v) { return v < -kLimit ? -kLimit : v > kLimit ? kLimit : v; }
/// Protected division: |den| < 1e-9 gives +limit for num >= 0, else -limit.
double protected_div(double num, double den);

struct Registers {
    double a0 = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
    friend bool operator==(const Registers&, const Registers&) = default;
};

/// Terminal values visible to one evaluation. Loop-only fields are ignored
/// outside the IN fragment.
struct EvalContext {
    double xn = 0, xp = 0, xc = 0, nv = 0, nc = 0;
    double ln = 0, lp = 0, lc = 0, cs = 0, xs = 0, ls = 0, ic = 0, il = 0;
};

struct EvalCounters {
    std::uint64_t nodes = 0;       // node evaluations
    std::uint64_t in_runs = 0;     // IN fragment executions
    std::uint64_t bound_violations = 0;
};

/// Evaluates a tree left to right, depth first. Side-effect functions write
/// the registers; every function result and register write is clamped to
/// [-1e6, 1e6]. `if` evaluates its condition and exactly one branch.
double eval_tree(const Tree& tree, const EvalContext& ctx, Registers& regs, EvalCounters* counters = nullptr);

}  // namespace satinit
