#include "dsat/formula.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dsat {

void validate(const Cnf& cnf) {
    for (std::size_t c = 0; c < cnf.clauses.size(); ++c) {
        const auto& cl = cnf.clauses[c];
        if (cl.empty() || cl.size() > 3)
            throw std::invalid_argument("clause " + std::to_string(c) + " has length " +
                                        std::to_string(cl.size()));
        for (std::size_t a = 0; a < cl.size(); ++a) {
            if (cl[a].var() == 0 || cl[a].var() > cnf.num_vars)
                throw std::invalid_argument("clause " + std::to_string(c) + ": variable out of range");
            for (std::size_t b = a + 1; b < cl.size(); ++b)
                if (cl[a].var() == cl[b].var())
                    throw std::invalid_argument("clause " + std::to_string(c) + ": duplicate variable");
        }
    }
}

bool verify_assignment(const Cnf& cnf, const Assignment& a) {
    bool all_satisfied = true;
    for (const auto& cl : cnf.clauses) {
        bool sat = false;
        for (const Literal lit : cl) {
            if (lit.var() >= a.size() || a[lit.var()] == Value::Unset)
                throw std::invalid_argument("verify_assignment: variable " +
                                            std::to_string(lit.var()) + " is unset");
            if ((a[lit.var()] == Value::True) == lit.positive()) sat = true;
        }
        all_satisfied = all_satisfied && sat;
    }
    return all_satisfied;
}

Formula::Formula(const Cnf& cnf)
    : num_vars_{cnf.num_vars},
      occ_(2 * (std::size_t{cnf.num_vars} + 1)),
      assignment_(std::size_t{cnf.num_vars} + 1, Value::Unset),
      table_(cnf.num_vars) {
    validate(cnf);
    clauses_.reserve(cnf.clauses.size());
    for (const auto& src : cnf.clauses) {
        ClauseState cl;
        cl.size = cl.len = static_cast<std::uint8_t>(src.size());
        std::copy(src.begin(), src.end(), cl.lits.begin());
        clauses_.push_back(cl);
    }
    for (std::uint32_t c = 0; c < clauses_.size(); ++c) {
        for (unsigned s = 0; s < clauses_[c].len; ++s) attach(c, s);
        ++live_by_len_[clauses_[c].len];
        if (clauses_[c].len == 1) unit_queue_.push_back(c);
    }
    for (Var v = 1; v <= num_vars_; ++v) table_.insert(v, {positive_degree(v), negative_degree(v)});
}

std::span<const Literal> Formula::original_clause(std::size_t c) const {
    return {clauses_[c].lits.data(), clauses_[c].size};
}

std::span<const Literal> Formula::live_literals(std::size_t c) const {
    return {clauses_[c].lits.data(), clauses_[c].len};
}

unsigned Formula::slot_of(const ClauseState& cl, Literal lit) const {
    for (unsigned s = 0; s < cl.size; ++s)
        if (cl.lits[s] == lit) return s;
    throw std::logic_error("literal not in clause");
}

void Formula::attach(std::uint32_t c, unsigned slot) {
    ClauseState& cl = clauses_[c];
    auto& list = occ_[cl.lits[slot].code()];
    cl.occ_pos[slot] = static_cast<std::uint32_t>(list.size());
    list.push_back(c);
}

// Swap-remove. Undone exactly by reattach_at() in LIFO order.
void Formula::detach(std::uint32_t c, unsigned slot) {
    ClauseState& cl = clauses_[c];
    const Literal lit = cl.lits[slot];
    auto& list = occ_[lit.code()];
    const std::uint32_t p = cl.occ_pos[slot];
    const std::uint32_t moved = list.back();
    list[p] = moved;
    ClauseState& other = clauses_[moved];
    other.occ_pos[slot_of(other, lit)] = p;
    list.pop_back();
    refresh_degree(lit.var());
}

void Formula::refresh_degree(Var v) {
    if (assignment_[v] == Value::Unset) table_.move(v, {positive_degree(v), negative_degree(v)});
}

void Formula::satisfy(std::uint32_t c) {
    ClauseState& cl = clauses_[c];
    --live_by_len_[cl.len];
    cl.satisfied = true;
    for (unsigned s = 0; s < cl.len; ++s) detach(c, s);
    trail_.push_back({Op::Satisfy, 0, c});
}

void Formula::shrink(std::uint32_t c, Literal lit, ReductionReport& report) {
    ClauseState& cl = clauses_[c];
    const unsigned s = slot_of(cl, lit);
    const unsigned last = cl.len - 1u;
    std::swap(cl.lits[s], cl.lits[last]);
    std::swap(cl.occ_pos[s], cl.occ_pos[last]);
    detach(c, last);
    --live_by_len_[cl.len];
    --cl.len;
    ++live_by_len_[cl.len];
    trail_.push_back({Op::Shrink, static_cast<std::uint8_t>(s), c});
    ++report.shrunk_clauses;
    if (cl.len == 1) {
        unit_queue_.push_back(c);
        report.new_unit_clauses.push_back(cl.lits[0]);
    } else if (cl.len == 0) {
        report.empty_clause_created = true;
    }
}

ReductionReport Formula::set_variable(Var v, bool value) {
    if (v == 0 || v > num_vars_) throw std::invalid_argument("set_variable: variable out of range");
    if (assignment_[v] != Value::Unset)
        throw std::invalid_argument("set_variable: variable " + std::to_string(v) + " already set");
    table_.remove(v);
    assignment_[v] = to_value(value);
    ++num_assigned_;
    trail_.push_back({Op::Assign, 0, v});

    ReductionReport report;
    const Literal sat{v, value};
    auto& sat_list = occ_[sat.code()];
    while (!sat_list.empty()) {
        satisfy(sat_list.back());
        ++report.satisfied_clauses;
    }
    auto& false_list = occ_[(~sat).code()];
    while (!false_list.empty()) shrink(false_list.back(), ~sat, report);
    return report;
}

std::optional<Literal> Formula::next_unit_literal() {
    while (unit_head_ < unit_queue_.size()) {
        const ClauseState& cl = clauses_[unit_queue_[unit_head_++]];
        if (!cl.satisfied && cl.len == 1) return cl.lits[0];
    }
    unit_queue_.clear();
    unit_head_ = 0;
    return std::nullopt;
}

void Formula::rollback(Mark mark) {
    while (trail_.size() > mark) {
        const TrailEntry e = trail_.back();
        trail_.pop_back();
        switch (e.op) {
            case Op::Assign:
                assignment_[e.index] = Value::Unset;
                --num_assigned_;
                table_.insert(e.index, {positive_degree(e.index), negative_degree(e.index)});
                break;
            case Op::Satisfy: {
                ClauseState& cl = clauses_[e.index];
                // Reattach in reverse detach order; each literal list sees the
                // exact inverse of its swap-remove.
                for (unsigned s = cl.len; s-- > 0;) {
                    const Literal lit = cl.lits[s];
                    auto& list = occ_[lit.code()];
                    const std::uint32_t p = cl.occ_pos[s];
                    if (p == list.size()) {
                        list.push_back(e.index);
                    } else {
                        const std::uint32_t displaced = list[p];
                        ClauseState& other = clauses_[displaced];
                        other.occ_pos[slot_of(other, lit)] = static_cast<std::uint32_t>(list.size());
                        list.push_back(displaced);
                        list[p] = e.index;
                    }
                    refresh_degree(lit.var());
                }
                cl.satisfied = false;
                ++live_by_len_[cl.len];
                break;
            }
            case Op::Shrink: {
                ClauseState& cl = clauses_[e.index];
                --live_by_len_[cl.len];
                ++cl.len;
                ++live_by_len_[cl.len];
                const unsigned s = cl.len - 1u;
                const Literal lit = cl.lits[s];
                auto& list = occ_[lit.code()];
                const std::uint32_t p = cl.occ_pos[s];
                if (p == list.size()) {
                    list.push_back(e.index);
                } else {
                    const std::uint32_t displaced = list[p];
                    ClauseState& other = clauses_[displaced];
                    other.occ_pos[slot_of(other, lit)] = static_cast<std::uint32_t>(list.size());
                    list.push_back(displaced);
                    list[p] = e.index;
                }
                refresh_degree(lit.var());
                // Restore the original literal order.
                std::swap(cl.lits[s], cl.lits[e.slot]);
                std::swap(cl.occ_pos[s], cl.occ_pos[e.slot]);
                break;
            }
        }
    }
    unit_queue_.clear();
    unit_head_ = 0;
    if (live_by_len_[1] > 0)
        for (std::uint32_t c = 0; c < clauses_.size(); ++c)
            if (!clauses_[c].satisfied && clauses_[c].len == 1) unit_queue_.push_back(c);
}

void Formula::complete_assignment() {
    for (Var v = 1; v <= num_vars_; ++v)
        if (assignment_[v] == Value::Unset) set_variable(v, true);
}

std::string Formula::consistency_error() const {
    std::ostringstream err;
    std::array<std::size_t, 4> by_len{};
    std::vector<std::vector<std::uint32_t>> expect(occ_.size());
    for (std::uint32_t c = 0; c < clauses_.size(); ++c) {
        const ClauseState& cl = clauses_[c];
        if (cl.satisfied) continue;
        ++by_len[cl.len];
        for (unsigned s = 0; s < cl.len; ++s) {
            const Literal lit = cl.lits[s];
            if (assignment_[lit.var()] != Value::Unset) {
                err << "clause " << c << " keeps assigned literal " << lit.to_dimacs();
                return err.str();
            }
            const auto& list = occ_[lit.code()];
            if (cl.occ_pos[s] >= list.size() || list[cl.occ_pos[s]] != c) {
                err << "clause " << c << " has stale occurrence position";
                return err.str();
            }
            expect[lit.code()].push_back(c);
        }
    }
    if (by_len != live_by_len_) return "live clause length counters disagree with recount";
    for (std::size_t code = 0; code < occ_.size(); ++code) {
        auto got = occ_[code];
        std::sort(got.begin(), got.end());
        if (got != expect[code]) {
            err << "occurrence list of literal " << Literal::from_code(static_cast<std::uint32_t>(code)).to_dimacs()
                << " disagrees with recount";
            return err.str();
        }
    }
    std::size_t unset = 0;
    for (Var v = 1; v <= num_vars_; ++v) {
        if (assignment_[v] != Value::Unset) {
            if (table_.contains(v)) return "assigned variable " + std::to_string(v) + " still in degree table";
            continue;
        }
        ++unset;
        if (!table_.contains(v)) return "unset variable " + std::to_string(v) + " missing from degree table";
        const Cell want{positive_degree(v), negative_degree(v)};
        if (!(table_.cell_of(v) == want)) return "variable " + std::to_string(v) + " in wrong degree cell";
    }
    if (unset != table_.size()) return "degree table size disagrees with unset count";
    if (unset + num_assigned_ != num_vars_) return "assigned counter disagrees with recount";
    return {};
}

Cnf Formula::residual() const {
    Cnf out;
    out.num_vars = num_vars_;
    for (const ClauseState& cl : clauses_) {
        if (cl.satisfied) continue;
        out.clauses.emplace_back(cl.lits.begin(), cl.lits.begin() + cl.len);
    }
    return out;
}

}  // namespace dsat
