#include "satinit/cnf.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "satinit/rng.hpp"

namespace satinit {

std::size_t Cnf::num_literals() const {
    std::size_t n = 0;
    for (const auto& c : clauses) n += c.size();
    return n;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

bool parse_long(std::string_view tok, long& out) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, out);
    return ec == std::errc() && ptr == end && !tok.empty();
}

}  // namespace

ParsedDimacs parse_dimacs(std::string_view text) {
    ParsedDimacs result;
    bool have_header = false;
    Clause current;
    std::size_t current_start_line = 0;
    // 1 = positive seen, 2 = negative seen
    std::vector<std::uint8_t> seen;
    bool tautology = false;

    auto finish_clause = [&]() {
        for (const auto& lit : current) seen[lit.var] = 0;
        if (tautology) {
            ++result.tautologies_dropped;
        } else {
            result.cnf.clauses.push_back(std::move(current));
        }
        current = Clause{};
        tautology = false;
    };

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = trim(text.substr(pos, nl - pos));
        ++line_no;
        pos = nl + 1;

        if (line.empty() || line.front() == 'c') continue;
        if (line.front() == '%') break;
        if (line.front() == 'p') {
            if (have_header) throw DimacsError(line_no, "duplicate header");
            const auto toks = split_ws(line);
            long nv = 0, nc = 0;
            if (toks.size() != 4 || toks[0] != "p" || toks[1] != "cnf" || !parse_long(toks[2], nv) ||
                !parse_long(toks[3], nc) || nv < 0 || nc < 0 ||
                nv > static_cast<long>(std::numeric_limits<std::int32_t>::max())) {
                throw DimacsError(line_no, "malformed header, expected 'p cnf <vars> <clauses>'");
            }
            result.cnf.num_vars = static_cast<std::uint32_t>(nv);
            result.declared_clauses = static_cast<std::size_t>(nc);
            seen.assign(result.cnf.num_vars + 1, 0);
            have_header = true;
            continue;
        }
        if (!have_header) throw DimacsError(line_no, "clause data before 'p cnf' header");

        for (auto tok : split_ws(line)) {
            long value = 0;
            if (!parse_long(tok, value)) {
                throw DimacsError(line_no, "non-integer token '" + std::string(tok) + "'");
            }
            if (value == 0) {
                finish_clause();
                continue;
            }
            if (current.empty() && !tautology) current_start_line = line_no;
            const Literal lit = Literal::from_dimacs(value);
            if (lit.var > result.cnf.num_vars) {
                throw DimacsError(line_no, "variable " + std::to_string(lit.var) + " exceeds declared " +
                                               std::to_string(result.cnf.num_vars));
            }
            const std::uint8_t bit = lit.negative ? 2 : 1;
            const std::uint8_t other = lit.negative ? 1 : 2;
            if (seen[lit.var] & bit) {
                ++result.duplicate_literals_removed;
                continue;
            }
            if (seen[lit.var] & other) tautology = true;
            seen[lit.var] |= bit;
            current.push_back(lit);
        }
        if (nl == text.size()) break;
    }
    if (!have_header) throw DimacsError(line_no, "missing 'p cnf' header");
    if (!current.empty() || tautology) {
        result.warnings.push_back("line " + std::to_string(current_start_line) +
                                  ": final clause not terminated by 0; accepted");
        finish_clause();
    }
    const std::size_t parsed = result.cnf.clauses.size() + result.tautologies_dropped;
    if (parsed != result.declared_clauses) {
        result.warnings.push_back("header declares " + std::to_string(result.declared_clauses) +
                                  " clauses, found " + std::to_string(parsed));
    }
    return result;
}

ParsedDimacs read_dimacs_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_dimacs(ss.str());
}

std::string write_dimacs(const Cnf& cnf, std::string_view comment) {
    std::string out;
    if (!comment.empty()) {
        out += "c ";
        out += comment;
        out += '\n';
    }
    out += "p cnf " + std::to_string(cnf.num_vars) + ' ' + std::to_string(cnf.clauses.size()) + '\n';
    for (const auto& clause : cnf.clauses) {
        for (const auto& lit : clause) {
            out += std::to_string(lit.to_dimacs());
            out += ' ';
        }
        out += "0\n";
    }
    return out;
}

VarStats compute_var_stats(const Cnf& cnf) {
    VarStats stats;
    stats.negative.assign(cnf.num_vars, 0);
    stats.positive.assign(cnf.num_vars, 0);
    for (const auto& clause : cnf.clauses) {
        for (const auto& lit : clause) {
            if (lit.negative)
                ++stats.negative[lit.var - 1];
            else
                ++stats.positive[lit.var - 1];
        }
    }
    return stats;
}

const char* to_string(BcpVerdict v) {
    switch (v) {
        case BcpVerdict::reduced: return "reduced";
        case BcpVerdict::satisfied: return "satisfied";
        case BcpVerdict::unsatisfiable: return "unsatisfiable";
    }
    return "?";
}

BcpResult preprocess_bcp(const Cnf& cnf) {
    // 0 unassigned, 1 true, -1 false
    std::vector<signed char> value(cnf.num_vars + 1, 0);
    auto lit_value = [&](Literal l) -> int {
        const int v = value[l.var];
        return l.negative ? -v : v;
    };

    BcpResult result;
    result.cnf.num_vars = cnf.num_vars;

    auto unsat = [&]() {
        result.verdict = BcpVerdict::unsatisfiable;
        result.cnf.clauses.assign(1, Clause{});
        return result;
    };

    // Occurrence lists let each assignment revisit only the clauses it touches.
    std::vector<std::vector<std::size_t>> occurs(cnf.num_vars + 1);
    for (std::size_t i = 0; i < cnf.clauses.size(); ++i)
        for (const auto& lit : cnf.clauses[i]) occurs[lit.var].push_back(i);

    std::vector<std::size_t> queue;
    auto examine = [&](std::size_t ci) -> bool {
        const Clause& c = cnf.clauses[ci];
        std::size_t unassigned = 0;
        Literal last{};
        for (const auto& lit : c) {
            const int v = lit_value(lit);
            if (v > 0) return true;
            if (v == 0) {
                ++unassigned;
                last = lit;
            }
        }
        if (unassigned == 0) return false;
        if (unassigned == 1) {
            value[last.var] = last.negative ? -1 : 1;
            result.forced.push_back(last);
            queue.push_back(last.var);
        }
        return true;
    };

    for (std::size_t i = 0; i < cnf.clauses.size(); ++i) {
        if (!examine(i)) return unsat();
    }
    while (!queue.empty()) {
        const std::uint32_t var = static_cast<std::uint32_t>(queue.back());
        queue.pop_back();
        for (std::size_t ci : occurs[var]) {
            if (!examine(ci)) return unsat();
        }
    }

    for (const auto& clause : cnf.clauses) {
        bool sat = false;
        Clause reduced;
        for (const auto& lit : clause) {
            const int v = lit_value(lit);
            if (v > 0) {
                sat = true;
                break;
            }
            if (v == 0) reduced.push_back(lit);
        }
        if (!sat) result.cnf.clauses.push_back(std::move(reduced));
    }
    result.verdict = result.cnf.clauses.empty() ? BcpVerdict::satisfied : BcpVerdict::reduced;
    return result;
}

ReorderMapping ReorderMapping::identity(const Cnf& cnf) {
    ReorderMapping m;
    m.var_to_new.resize(cnf.num_vars);
    std::iota(m.var_to_new.begin(), m.var_to_new.end(), 1u);
    m.inverted.assign(cnf.num_vars, false);
    m.clause_to_new.resize(cnf.clauses.size());
    std::iota(m.clause_to_new.begin(), m.clause_to_new.end(), std::size_t{0});
    return m;
}

std::string ReorderMapping::serialize() const {
    std::string out;
    for (std::size_t i = 0; i < var_to_new.size(); ++i) {
        out += "v " + std::to_string(i + 1) + ' ' + std::to_string(var_to_new[i]) + ' ' +
               (inverted[i] ? "1" : "0") + '\n';
    }
    for (std::size_t i = 0; i < clause_to_new.size(); ++i) {
        out += "c " + std::to_string(i) + ' ' + std::to_string(clause_to_new[i]) + '\n';
    }
    return out;
}

ReorderMapping ReorderMapping::parse(std::string_view text) {
    ReorderMapping m;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto toks = split_ws(line);
        long a = 0, b = 0, inv = 0;
        if (toks[0] == "v" && toks.size() == 4 && parse_long(toks[1], a) && parse_long(toks[2], b) &&
            parse_long(toks[3], inv) && a >= 1 && b >= 1 && (inv == 0 || inv == 1)) {
            if (static_cast<std::size_t>(a) != m.var_to_new.size() + 1)
                throw DimacsError(line_no, "mapping variables must be listed in order");
            m.var_to_new.push_back(static_cast<std::uint32_t>(b));
            m.inverted.push_back(inv == 1);
        } else if (toks[0] == "c" && toks.size() == 3 && parse_long(toks[1], a) && parse_long(toks[2], b) &&
                   a >= 0 && b >= 0) {
            if (static_cast<std::size_t>(a) != m.clause_to_new.size())
                throw DimacsError(line_no, "mapping clauses must be listed in order");
            m.clause_to_new.push_back(static_cast<std::size_t>(b));
        } else {
            throw DimacsError(line_no, "malformed mapping line");
        }
    }
    return m;
}

Cnf apply_mapping(const Cnf& cnf, const ReorderMapping& mapping) {
    Cnf out;
    out.num_vars = cnf.num_vars;
    out.clauses.resize(cnf.clauses.size());
    for (std::size_t i = 0; i < cnf.clauses.size(); ++i) {
        Clause mapped;
        mapped.reserve(cnf.clauses[i].size());
        for (const auto& lit : cnf.clauses[i]) mapped.push_back(mapping.map(lit));
        out.clauses[mapping.clause_to_new[i]] = std::move(mapped);
    }
    return out;
}

Cnf unapply_mapping(const Cnf& reordered, const ReorderMapping& mapping) {
    std::vector<std::uint32_t> new_to_old(mapping.var_to_new.size());
    for (std::size_t i = 0; i < mapping.var_to_new.size(); ++i)
        new_to_old[mapping.var_to_new[i] - 1] = static_cast<std::uint32_t>(i + 1);
    Cnf out;
    out.num_vars = reordered.num_vars;
    out.clauses.resize(reordered.clauses.size());
    for (std::size_t i = 0; i < mapping.clause_to_new.size(); ++i) {
        const Clause& src = reordered.clauses[mapping.clause_to_new[i]];
        Clause c;
        c.reserve(src.size());
        for (const auto& lit : src) {
            const std::uint32_t old = new_to_old[lit.var - 1];
            c.push_back({old, lit.negative != static_cast<bool>(mapping.inverted[old - 1])});
        }
        out.clauses[i] = std::move(c);
    }
    return out;
}

Reordered reorder(const Cnf& cnf, std::uint64_t seed) {
    SplitMix64 rng(seed);
    ReorderMapping m = ReorderMapping::identity(cnf);
    rng.shuffle(m.var_to_new);
    for (std::size_t i = 0; i < m.inverted.size(); ++i) m.inverted[i] = (rng.next() >> 63) != 0;
    rng.shuffle(m.clause_to_new);
    Cnf out = apply_mapping(cnf, m);
    return {std::move(out), std::move(m)};
}

Model map_model_back(const Model& reordered_model, const ReorderMapping& mapping) {
    Model original(mapping.var_to_new.size());
    for (std::size_t i = 0; i < mapping.var_to_new.size(); ++i) {
        original[i] = reordered_model[mapping.var_to_new[i] - 1] != static_cast<bool>(mapping.inverted[i]);
    }
    return original;
}

bool satisfies(const Cnf& cnf, const Model& model) {
    if (model.size() < cnf.num_vars) return false;
    for (const auto& clause : cnf.clauses) {
        bool sat = false;
        for (const auto& lit : clause) {
            if (model[lit.var - 1] != lit.negative) {
                sat = true;
                break;
            }
        }
        if (!sat) return false;
    }
    return true;
}

}  // namespace satinit
