#include "dsat/dimacs.hpp"

#include <charconv>
#include <sstream>

namespace dsat {

DimacsError::DimacsError(Kind kind, std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), kind_{kind}, line_{line} {}

namespace {

using Kind = DimacsError::Kind;

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

bool parse_long(std::string_view tok, long& out) {
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

Cnf parse_dimacs(std::string_view text) {
    Cnf cnf;
    bool have_header = false;
    long declared_clauses = 0;
    std::vector<Literal> pending;
    std::size_t pending_line = 0;
    std::size_t line_no = 0;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        const auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks[0][0] == 'c') continue;
        if (toks[0][0] == '%') break;
        if (toks[0] == "p") {
            long n = 0;
            if (have_header || toks.size() != 4 || toks[1] != "cnf" || !parse_long(toks[2], n) ||
                !parse_long(toks[3], declared_clauses) || n < 0 || declared_clauses < 0 ||
                n > 0x3fffffffL)
                throw DimacsError(Kind::MalformedHeader, line_no, "malformed header '" + std::string(line) + "'");
            cnf.num_vars = static_cast<Var>(n);
            have_header = true;
            continue;
        }
        if (!have_header) throw DimacsError(Kind::MissingHeader, line_no, "clause data before 'p cnf' header");

        for (const auto tok : toks) {
            long value = 0;
            if (!parse_long(tok, value))
                throw DimacsError(Kind::BadToken, line_no, "bad token '" + std::string(tok) + "'");
            if (value == 0) {
                if (pending.empty() || pending.size() > 3)
                    throw DimacsError(Kind::BadClauseLength, line_no,
                                      "clause length " + std::to_string(pending.size()) + " not in {1,2,3}");
                cnf.clauses.push_back(std::move(pending));
                pending.clear();
                continue;
            }
            if (value > long{cnf.num_vars} || -value > long{cnf.num_vars})
                throw DimacsError(Kind::LiteralOutOfRange, line_no,
                                  "literal " + std::to_string(value) + " out of range");
            const Literal lit = Literal::from_dimacs(value);
            for (const Literal other : pending)
                if (other.var() == lit.var())
                    throw DimacsError(Kind::DuplicateVariable, line_no,
                                      "duplicate variable " + std::to_string(lit.var()) + " in clause");
            if (pending.empty()) pending_line = line_no;
            pending.push_back(lit);
            if (pending.size() > 3)
                throw DimacsError(Kind::BadClauseLength, line_no, "clause longer than 3 literals");
        }
    }
    if (!pending.empty())
        throw DimacsError(Kind::MissingTerminator, pending_line, "clause not terminated by 0");
    if (!have_header) throw DimacsError(Kind::MissingHeader, line_no, "missing 'p cnf' header");
    if (static_cast<long>(cnf.clauses.size()) != declared_clauses)
        throw DimacsError(Kind::ClauseCountMismatch, line_no,
                          "header declares " + std::to_string(declared_clauses) + " clauses, found " +
                              std::to_string(cnf.clauses.size()));
    return cnf;
}

std::string emit_dimacs(const Cnf& cnf) {
    std::ostringstream out;
    out << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
    for (const auto& cl : cnf.clauses) {
        for (const Literal lit : cl) out << lit.to_dimacs() << ' ';
        out << "0\n";
    }
    return out.str();
}

std::string emit_dimacs(const Formula& f) {
    std::ostringstream out;
    out << "c assigned";
    for (Var v = 1; v <= f.num_vars(); ++v)
        if (f.value(v) != Value::Unset) out << ' ' << (f.value(v) == Value::True ? long(v) : -long(v));
    out << '\n';
    out << emit_dimacs(f.residual());
    return out.str();
}

}  // namespace dsat
