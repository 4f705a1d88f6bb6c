#include "satinit/program.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace satinit {

namespace {

struct OpInfo {
    std::string_view name;
    int arity;
    bool loop_only;
    bool side_effect;
};

constexpr std::array<OpInfo, kNumOps> kOpTable{{
    {"0", 0, false, false},      {"1", 0, false, false},      {"2", 0, false, false},
    {"3", 0, false, false},      {"4", 0, false, false},      {"xn", 0, false, false},
    {"xp", 0, false, false},     {"xc", 0, false, false},     {"nv", 0, false, false},
    {"nc", 0, false, false},     {"a0", 0, false, false},     {"v1", 0, false, false},
    {"v2", 0, false, false},     {"ln", 0, true, false},      {"lp", 0, true, false},
    {"lc", 0, true, false},      {"cs", 0, true, false},      {"xs", 0, true, false},
    {"ls", 0, true, false},      {"ic", 0, true, false},      {"il", 0, true, false},
    {"add", 1, false, true},     {"sub", 1, false, true},     {"mul", 1, false, true},
    {"div", 1, false, true},     {"set", 1, false, true},     {"setv1", 1, false, true},
    {"setv2", 1, false, true},   {"inv", 1, false, false},    {"neg", 1, false, false},
    {"exp", 1, false, false},    {"log", 1, false, false},    {"sgn", 1, false, false},
    {"sqrt", 1, false, false},   {"abs", 1, false, false},    {"progn2", 2, false, false},
    {"min", 2, false, false},    {"max", 2, false, false},    {"and", 2, false, false},
    {"or", 2, false, false},     {"xor", 2, false, false},    {"lessthan", 2, false, false},
    {"+", 2, false, false},      {"-", 2, false, false},      {"*", 2, false, false},
    {"%", 2, false, false},      {"progn3", 3, false, false}, {"if", 3, false, false},
}};

const OpInfo& info(Op op) { return kOpTable[static_cast<std::size_t>(op)]; }

constexpr std::array<Op, 13> kGlobalTerminals{Op::xn, Op::xp, Op::xc, Op::nv, Op::nc, Op::c0, Op::c1,
                                              Op::c2, Op::c3, Op::c4, Op::a0, Op::v1, Op::v2};
constexpr std::array<Op, 21> kAllTerminals{Op::xn, Op::xp, Op::xc, Op::nv, Op::nc, Op::c0, Op::c1,
                                           Op::c2, Op::c3, Op::c4, Op::a0, Op::v1, Op::v2, Op::ln,
                                           Op::lp, Op::lc, Op::cs, Op::xs, Op::ls, Op::ic, Op::il};
constexpr std::array<Op, 27> kFunctions{
    Op::add,    Op::sub,  Op::mul,  Op::div,  Op::set,  Op::setv1, Op::setv2,    Op::inv,  Op::neg,
    Op::exp,    Op::log,  Op::sgn,  Op::sqrt, Op::abs,  Op::progn2, Op::min,     Op::max,  Op::and_,
    Op::or_,    Op::xor_, Op::lessthan, Op::plus, Op::minus, Op::times, Op::pdiv, Op::progn3, Op::if_};

}  // namespace

const char* fragment_label(Fragment f) {
    switch (f) {
        case Fragment::pre: return "PRE";
        case Fragment::in: return "IN";
        case Fragment::post: return "POST";
    }
    return "?";
}

int arity(Op op) { return info(op).arity; }
bool is_terminal(Op op) { return info(op).arity == 0; }
bool is_loop_only(Op op) { return info(op).loop_only; }
bool has_side_effect(Op op) { return info(op).side_effect; }
bool legal_in(Op op, Fragment f) { return f == Fragment::in || !is_loop_only(op); }
std::string_view op_name(Op op) { return info(op).name; }

std::span<const Op> terminals_for(Fragment f) {
    if (f == Fragment::in) return kAllTerminals;
    return kGlobalTerminals;
}
std::span<const Op> functions() { return kFunctions; }

// ---- Tree ----

Tree::Tree(std::vector<Op> prefix) : nodes_(std::move(prefix)) {
    long need = 1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (need <= 0) throw std::invalid_argument("prefix sequence has trailing nodes");
        need += arity(nodes_[i]) - 1;
    }
    if (nodes_.empty() || need != 0) throw std::invalid_argument("prefix sequence is not a complete tree");
}

std::size_t Tree::subtree_end(std::size_t i) const {
    long need = 1;
    while (need > 0) {
        need += arity(nodes_[i]) - 1;
        ++i;
    }
    return i;
}

int Tree::depth_at(std::size_t i) const {
    const std::size_t end = subtree_end(i);
    std::vector<int> pending;
    int best = 0;
    for (std::size_t k = i; k < end; ++k) {
        const int d = static_cast<int>(pending.size()) + 1;
        best = std::max(best, d);
        const int a = arity(nodes_[k]);
        if (a > 0) {
            pending.push_back(a);
        } else {
            while (!pending.empty() && --pending.back() == 0) pending.pop_back();
        }
    }
    return best;
}

int Tree::depth() const { return depth_at(0); }

bool Tree::legal_in(Fragment f) const {
    return std::all_of(nodes_.begin(), nodes_.end(), [f](Op op) { return satinit::legal_in(op, f); });
}

bool Tree::has_side_effect() const {
    return std::any_of(nodes_.begin(), nodes_.end(), [](Op op) { return satinit::has_side_effect(op); });
}

Tree Tree::splice(std::size_t at, const Tree& donor, std::size_t from) const {
    const std::size_t at_end = subtree_end(at);
    const std::size_t from_end = donor.subtree_end(from);
    std::vector<Op> out;
    out.reserve(nodes_.size() - (at_end - at) + (from_end - from));
    out.insert(out.end(), nodes_.begin(), nodes_.begin() + static_cast<long>(at));
    out.insert(out.end(), donor.nodes_.begin() + static_cast<long>(from),
               donor.nodes_.begin() + static_cast<long>(from_end));
    out.insert(out.end(), nodes_.begin() + static_cast<long>(at_end), nodes_.end());
    Tree t;
    t.nodes_ = std::move(out);
    return t;
}

int InitProgram::max_depth() const { return std::max({pre.depth(), in.depth(), post.depth()}); }

bool InitProgram::well_formed() const {
    return pre.legal_in(Fragment::pre) && in.legal_in(Fragment::in) && post.legal_in(Fragment::post);
}

// ---- parsing ----

namespace {

class ExprParser {
public:
    ExprParser(std::string_view text, Fragment f) : text_(text), fragment_(f) {}

    std::vector<Op> parse_fragment() {
        std::vector<std::vector<Op>> items;
        items.push_back(parse_expr());
        while (peek() == ',') {
            ++pos_;
            items.push_back(parse_expr());
        }
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return make_sequence(items, 0);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ProgramParseError(std::string(fragment_label(fragment_)) + " fragment, column " +
                                std::to_string(pos_ + 1) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    // a, b -> progn2(a, b); a, b, c -> progn3(a, b, c); longer sequences nest in the last slot.
    static std::vector<Op> make_sequence(const std::vector<std::vector<Op>>& items, std::size_t first) {
        const std::size_t n = items.size() - first;
        if (n == 1) return items[first];
        std::vector<Op> out;
        if (n == 2) {
            out.push_back(Op::progn2);
            append(out, items[first]);
            append(out, items[first + 1]);
        } else if (n == 3) {
            out.push_back(Op::progn3);
            for (std::size_t k = 0; k < 3; ++k) append(out, items[first + k]);
        } else {
            out.push_back(Op::progn3);
            append(out, items[first]);
            append(out, items[first + 1]);
            append(out, make_sequence(items, first + 2));
        }
        return out;
    }

    static void append(std::vector<Op>& out, const std::vector<Op>& part) {
        out.insert(out.end(), part.begin(), part.end());
    }

    static std::vector<Op> binary(Op op, const std::vector<Op>& lhs, const std::vector<Op>& rhs) {
        std::vector<Op> out{op};
        append(out, lhs);
        append(out, rhs);
        return out;
    }

    std::vector<Op> parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            const char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            lhs = binary(c == '+' ? Op::plus : Op::minus, lhs, parse_term());
        }
    }

    std::vector<Op> parse_term() {
        auto lhs = parse_unary();
        for (;;) {
            const char c = peek();
            if (c != '*' && c != '%') return lhs;
            ++pos_;
            lhs = binary(c == '*' ? Op::times : Op::pdiv, lhs, parse_unary());
        }
    }

    std::vector<Op> parse_unary() {
        if (peek() == '-') {
            ++pos_;
            std::vector<Op> out{Op::neg};
            append(out, parse_unary());
            return out;
        }
        return parse_primary();
    }

    std::vector<Op> parse_primary() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            auto e = parse_expr();
            expect(')');
            return e;
        }
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '.'))
            ++pos_;
        if (start == pos_) fail(c == '\0' ? "unexpected end of expression" : std::string("unexpected '") + c + "'");
        std::string name(text_.substr(start, pos_ - start));
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });

        Op op{};
        bool found = false;
        for (std::size_t k = 0; k < kNumOps; ++k) {
            const Op cand = static_cast<Op>(k);
            // infix symbols are not callable by name
            if (cand == Op::plus || cand == Op::minus || cand == Op::times || cand == Op::pdiv) continue;
            if (op_name(cand) == name) {
                op = cand;
                found = true;
                break;
            }
        }
        if (!found) {
            pos_ = start;
            fail("unknown symbol '" + name + "'");
        }
        if (!legal_in(op, fragment_)) {
            pos_ = start;
            fail("terminal '" + name + "' is only available in the IN fragment");
        }

        std::vector<Op> out{op};
        const int want = arity(op);
        if (want == 0) {
            if (peek() == '(') fail("'" + name + "' is a terminal and takes no arguments");
            return out;
        }
        if (peek() != '(') fail("'" + name + "' expects " + std::to_string(want) + " argument(s)");
        ++pos_;
        int got = 0;
        if (peek() != ')') {
            for (;;) {
                append(out, parse_expr());
                ++got;
                if (peek() != ',') break;
                ++pos_;
            }
        }
        expect(')');
        if (got != want) {
            fail("'" + name + "' expects " + std::to_string(want) + " argument(s), got " + std::to_string(got));
        }
        return out;
    }

    std::string_view text_;
    Fragment fragment_;
    std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (std::toupper(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    return true;
}

// Matches a fragment label at the start of `line`; on success strips it.
bool take_label(std::string_view& line, Fragment& f) {
    struct Label {
        std::string_view text;
        Fragment fragment;
    };
    // Longest spellings first so "PRE_LOOP_CODE" is not read as "PRE".
    static constexpr std::array<Label, 6> labels{{{"PRE_LOOP_CODE", Fragment::pre},
                                                  {"IN_LOOP_CODE", Fragment::in},
                                                  {"POST_LOOP_CODE", Fragment::post},
                                                  {"POST", Fragment::post},
                                                  {"PRE", Fragment::pre},
                                                  {"IN", Fragment::in}}};
    for (const auto& l : labels) {
        if (!starts_with_ci(line, l.text)) continue;
        std::string_view rest = trim(line.substr(l.text.size()));
        if (rest.empty() || (rest.front() != ':' && rest.front() != '=')) continue;
        line = rest.substr(1);
        f = l.fragment;
        return true;
    }
    return false;
}

}  // namespace

Tree parse_tree(std::string_view text, Fragment f) {
    std::string_view body = trim(text);
    if (body.size() >= 2 && body.front() == '{' && body.back() == '}') body = trim(body.substr(1, body.size() - 2));
    if (body.empty()) return Tree{};
    return Tree(ExprParser(body, f).parse_fragment());
}

InitProgram parse_program(std::string_view text) {
    std::array<std::string, 3> bodies;
    std::array<bool, 3> present{false, false, false};
    int current = -1;

    std::string normalized(text);
    std::replace(normalized.begin(), normalized.end(), '/', '\n');
    std::string_view rest = normalized;
    while (!rest.empty()) {
        std::size_t nl = rest.find('\n');
        std::string_view line = trim(rest.substr(0, nl));
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        if (line.empty() || line.front() == '#') continue;
        Fragment f{};
        if (take_label(line, f)) {
            const int idx = static_cast<int>(f);
            if (present[idx]) throw ProgramParseError(std::string("duplicate ") + fragment_label(f) + " fragment");
            present[idx] = true;
            current = idx;
            bodies[idx] = std::string(trim(line));
        } else {
            if (current < 0) throw ProgramParseError("expected a PRE:, IN: or POST: label before '" + std::string(line) + "'");
            bodies[current] += ' ';
            bodies[current] += line;
        }
    }
    if (current < 0) throw ProgramParseError("program text has no fragments");
    InitProgram prog;
    for (Fragment f : kFragments) prog.fragment(f) = parse_tree(bodies[static_cast<int>(f)], f);
    return prog;
}

// ---- printing ----

namespace {

int precedence(Op op) {
    switch (op) {
        case Op::plus:
        case Op::minus: return 1;
        case Op::times:
        case Op::pdiv: return 2;
        default: return 3;
    }
}

class Printer {
public:
    explicit Printer(const Tree& t) : nodes_(t.nodes()), tree_(t) {}

    std::string sequence(std::size_t i) {
        const Op op = nodes_[i];
        if (op == Op::progn2) {
            std::size_t a = i + 1, b = tree_.subtree_end(a);
            return expr(a) + ", " + expr(b);
        }
        if (op == Op::progn3) {
            std::size_t a = i + 1, b = tree_.subtree_end(a), c = tree_.subtree_end(b);
            const Op last = nodes_[c];
            const std::string tail = (last == Op::progn2 || last == Op::progn3) ? sequence(c) : expr(c);
            return expr(a) + ", " + expr(b) + ", " + tail;
        }
        return expr(i);
    }

    std::string expr(std::size_t i) {
        const Op op = nodes_[i];
        const int a = arity(op);
        if (a == 0) return std::string(op_name(op));
        const int prec = precedence(op);
        if (prec < 3) {
            const std::size_t lhs = i + 1, rhs = tree_.subtree_end(lhs);
            std::string l = expr(lhs), r = expr(rhs);
            if (precedence(nodes_[lhs]) < prec) l = '(' + l + ')';
            if (precedence(nodes_[rhs]) <= prec) r = '(' + r + ')';
            return l + std::string(op_name(op)) + r;
        }
        std::string out(op_name(op));
        out += '(';
        std::size_t child = i + 1;
        for (int k = 0; k < a; ++k) {
            if (k > 0) out += ", ";
            out += expr(child);
            child = tree_.subtree_end(child);
        }
        out += ')';
        return out;
    }

private:
    std::span<const Op> nodes_;
    const Tree& tree_;
};

}  // namespace

std::string print_tree(const Tree& tree) { return Printer(tree).sequence(0); }

std::string print_program(const InitProgram& prog) {
    std::string out;
    for (Fragment f : kFragments) {
        out += fragment_label(f);
        out += ": ";
        out += print_tree(prog.fragment(f));
        if (f != Fragment::post) out += '\n';
    }
    return out;
}

InitProgram preset(std::string_view name) {
    if (name == "zero") return InitProgram{};
    if (name == "add_lc") return parse_program("IN: add(lc)");
    if (name == "sub_xp") return parse_program("IN: sub(xp)");
    if (name == "precursor") return parse_program("IN: add(exp(-lc)-lp)");
    throw std::invalid_argument("unknown preset '" + std::string(name) + "' (known: zero, add_lc, sub_xp, precursor)");
}

std::vector<std::string_view> preset_names() { return {"zero", "add_lc", "sub_xp", "precursor"}; }

// ---- evaluation ----

double protected_div(double num, double den) {
    if (std::fabs(den) < kDivEpsilon) return num >= 0.0 ? kLimit : -kLimit;
    return num / den;
}

namespace {

class Evaluator {
public:
    Evaluator(const Tree& t, const EvalContext& ctx, Registers& regs, EvalCounters* counters)
        : tree_(t), nodes_(t.nodes()), ctx_(ctx), regs_(regs), counters_(counters) {}

    double run() {
        std::size_t i = 0;
        return eval(i);
    }

private:
    double eval(std::size_t& i) {
        if (counters_) ++counters_->nodes;
        const Op op = nodes_[i++];
        switch (op) {
            case Op::c0: return 0.0;
            case Op::c1: return 1.0;
            case Op::c2: return 2.0;
            case Op::c3: return 3.0;
            case Op::c4: return 4.0;
            case Op::xn: return ctx_.xn;
            case Op::xp: return ctx_.xp;
            case Op::xc: return ctx_.xc;
            case Op::nv: return ctx_.nv;
            case Op::nc: return ctx_.nc;
            case Op::a0: return regs_.a0;
            case Op::v1: return regs_.v1;
            case Op::v2: return regs_.v2;
            case Op::ln: return ctx_.ln;
            case Op::lp: return ctx_.lp;
            case Op::lc: return ctx_.lc;
            case Op::cs: return ctx_.cs;
            case Op::xs: return ctx_.xs;
            case Op::ls: return ctx_.ls;
            case Op::ic: return ctx_.ic;
            case Op::il: return ctx_.il;

            case Op::add: { const double v = eval(i); return regs_.a0 = clamp_value(regs_.a0 + v); }
            case Op::sub: { const double v = eval(i); return regs_.a0 = clamp_value(regs_.a0 - v); }
            case Op::mul: { const double v = eval(i); return regs_.a0 = clamp_value(regs_.a0 * v); }
            case Op::div: { const double v = eval(i); return regs_.a0 = clamp_value(protected_div(regs_.a0, v)); }
            case Op::set: return regs_.a0 = clamp_value(eval(i));
            case Op::setv1: return regs_.v1 = clamp_value(eval(i));
            case Op::setv2: return regs_.v2 = clamp_value(eval(i));

            case Op::inv: return clamp_value(protected_div(1.0, eval(i)));
            case Op::neg: return clamp_value(-eval(i));
            case Op::exp: return clamp_value(std::exp(eval(i)));
            case Op::log: {
                const double v = eval(i);
                return v <= 0.0 ? -kLimit : clamp_value(std::log(v));
            }
            case Op::sgn: {
                const double v = eval(i);
                return v < 0.0 ? -1.0 : v > 0.0 ? 1.0 : 0.0;
            }
            case Op::sqrt: {
                const double v = eval(i);
                return v < 0.0 ? -1.0 : clamp_value(std::sqrt(v));
            }
            case Op::abs: return clamp_value(std::fabs(eval(i)));

            case Op::progn2: {
                eval(i);
                return clamp_value(eval(i));
            }
            case Op::progn3: {
                eval(i);
                eval(i);
                return clamp_value(eval(i));
            }
            case Op::if_: {
                const double cond = eval(i);
                double r = 0.0;
                if (cond > 0.0) {
                    r = eval(i);
                    i = tree_.subtree_end(i);
                } else {
                    i = tree_.subtree_end(i);
                    r = eval(i);
                }
                return clamp_value(r);
            }
            default: break;
        }
        const double x = eval(i);
        const double y = eval(i);
        switch (op) {
            case Op::min: return clamp_value(std::min(x, y));
            case Op::max: return clamp_value(std::max(x, y));
            case Op::and_: return (x > 0.0 && y > 0.0) ? 1.0 : 0.0;
            case Op::or_: return (x > 0.0 || y > 0.0) ? 1.0 : 0.0;
            case Op::xor_: return ((x > 0.0) != (y > 0.0)) ? 1.0 : 0.0;
            case Op::lessthan: return x < y ? 1.0 : 0.0;
            case Op::plus: return clamp_value(x + y);
            case Op::minus: return clamp_value(x - y);
            case Op::times: return clamp_value(x * y);
            case Op::pdiv: return clamp_value(protected_div(x, y));
            default: break;
        }
        return 0.0;  // unreachable for well-formed trees
    }

    const Tree& tree_;
    std::span<const Op> nodes_;
    const EvalContext& ctx_;
    Registers& regs_;
    EvalCounters* counters_;
};

}  // namespace

double eval_tree(const Tree& tree, const EvalContext& ctx, Registers& regs, EvalCounters* counters) {
    return Evaluator(tree, ctx, regs, counters).run();
}

}  // namespace satinit
