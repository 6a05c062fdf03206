#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace dsat {

/// Signed degree of a variable: `pos` positive and `neg` negative live
/// occurrences.
struct Cell {
    std::uint32_t pos = 0;
    std::uint32_t neg = 0;

    std::uint32_t sum() const { return pos + neg; }
    std::uint32_t diff() const { return pos > neg ? pos - neg : neg - pos; }
    bool pure() const { return (pos == 0) != (neg == 0); }
    Cell mirror() const { return {neg, pos}; }

    friend bool operator==(Cell, Cell) = default;
};

/// Buckets of unset variables keyed by signed degree. Cells with both
/// coordinates below the dense cap live in a flat grid; larger degrees spill
/// into a hash map. Insert, remove and move are O(1); iteration over
/// nonempty cells costs O(#nonempty cells).
class DegreeTable {
public:
    static constexpr std::uint32_t kDenseCap = 64;

    explicit DegreeTable(std::uint32_t num_vars = 0);

    void insert(std::uint32_t var, Cell cell);
    void remove(std::uint32_t var);
    void move(std::uint32_t var, Cell cell);

    bool contains(std::uint32_t var) const { return slot_of_var_[var] >= 0; }
    Cell cell_of(std::uint32_t var) const;

    std::span<const std::uint32_t> members(Cell cell) const;
    std::size_t count(Cell cell) const { return members(cell).size(); }

    /// Total number of tracked (unset) variables.
    std::size_t size() const { return size_; }

    /// Snapshot of the currently nonempty cells, in unspecified but
    /// deterministic order.
    template <class F>
    void for_each_nonempty(F&& f) const {
        for (const std::int32_t s : nonempty_) f(slots_[s].cell, slots_[s].vars.size());
    }
    std::size_t num_nonempty() const { return nonempty_.size(); }

private:
    struct Slot {
        Cell cell;
        std::vector<std::uint32_t> vars;
        std::int32_t nonempty_pos = -1;
    };

    std::int32_t find_slot(Cell cell) const;
    std::int32_t slot_for(Cell cell);

    std::vector<Slot> slots_;
    std::vector<std::int32_t> dense_;  // kDenseCap^2 slot ids, -1 when absent
    std::unordered_map<std::uint64_t, std::int32_t> overflow_;
    std::vector<std::int32_t> nonempty_;
    std::vector<std::int32_t> slot_of_var_;
    std::vector<std::uint32_t> pos_in_slot_;
    std::size_t size_ = 0;
};

}  // namespace dsat
