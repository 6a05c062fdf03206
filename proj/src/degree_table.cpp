#include "dsat/degree_table.hpp"

#include <stdexcept>

namespace dsat {

namespace {

std::uint64_t overflow_key(Cell c) { return (std::uint64_t{c.pos} << 32) | c.neg; }

}  // namespace

DegreeTable::DegreeTable(std::uint32_t num_vars)
    : dense_(kDenseCap * kDenseCap, -1),
      slot_of_var_(num_vars + 1, -1),
      pos_in_slot_(num_vars + 1, 0) {}

std::int32_t DegreeTable::find_slot(Cell cell) const {
    if (cell.pos < kDenseCap && cell.neg < kDenseCap) return dense_[cell.pos * kDenseCap + cell.neg];
    const auto it = overflow_.find(overflow_key(cell));
    return it == overflow_.end() ? -1 : it->second;
}

std::int32_t DegreeTable::slot_for(Cell cell) {
    std::int32_t id = find_slot(cell);
    if (id >= 0) return id;
    id = static_cast<std::int32_t>(slots_.size());
    slots_.push_back(Slot{cell, {}, -1});
    if (cell.pos < kDenseCap && cell.neg < kDenseCap)
        dense_[cell.pos * kDenseCap + cell.neg] = id;
    else
        overflow_.emplace(overflow_key(cell), id);
    return id;
}

void DegreeTable::insert(std::uint32_t var, Cell cell) {
    if (slot_of_var_[var] >= 0) throw std::logic_error("DegreeTable: variable already present");
    const std::int32_t id = slot_for(cell);
    Slot& slot = slots_[id];
    if (slot.vars.empty()) {
        slot.nonempty_pos = static_cast<std::int32_t>(nonempty_.size());
        nonempty_.push_back(id);
    }
    pos_in_slot_[var] = static_cast<std::uint32_t>(slot.vars.size());
    slot.vars.push_back(var);
    slot_of_var_[var] = id;
    ++size_;
}

void DegreeTable::remove(std::uint32_t var) {
    const std::int32_t id = slot_of_var_[var];
    if (id < 0) throw std::logic_error("DegreeTable: variable not present");
    Slot& slot = slots_[id];
    const std::uint32_t p = pos_in_slot_[var];
    const std::uint32_t last = slot.vars.back();
    slot.vars[p] = last;
    pos_in_slot_[last] = p;
    slot.vars.pop_back();
    slot_of_var_[var] = -1;
    --size_;
    if (slot.vars.empty()) {
        const std::int32_t q = slot.nonempty_pos;
        const std::int32_t moved = nonempty_.back();
        nonempty_[q] = moved;
        slots_[moved].nonempty_pos = q;
        nonempty_.pop_back();
        slot.nonempty_pos = -1;
    }
}

void DegreeTable::move(std::uint32_t var, Cell cell) {
    const std::int32_t id = slot_of_var_[var];
    if (id >= 0 && slots_[id].cell == cell) return;
    remove(var);
    insert(var, cell);
}

Cell DegreeTable::cell_of(std::uint32_t var) const {
    const std::int32_t id = slot_of_var_[var];
    if (id < 0) throw std::logic_error("DegreeTable: variable not present");
    return slots_[id].cell;
}

std::span<const std::uint32_t> DegreeTable::members(Cell cell) const {
    const std::int32_t id = find_slot(cell);
    if (id < 0) return {};
    return slots_[id].vars;
}

}  // namespace dsat
