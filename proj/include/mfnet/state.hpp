#pragma once

#include "mfnet/abstraction.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>

namespace mfnet {

// Aggregated node state (p, c, h, u).
struct NodeState {
    int p = 0;
    int c = 0;
    Decade h = Decade::s1970;
    ClassId u = 0;

    friend auto operator<=>(const NodeState &, const NodeState &) = default;
};

// Throws DomainError if p or c leave their bins.
void check_bins(const NodeState &s);

using StateIndex = std::uint32_t;

// Dense enumeration of every state, ordered by (u, h, c, p) with p fastest.
class StateSpace {
  public:
    static constexpr std::size_t kPerClass =
        static_cast<std::size_t>(kMaxPublications + 1) * kCoauthorCategories * kDecadeCount; // 325

    StateSpace() = default;
    explicit StateSpace(std::size_t class_count);

    std::size_t size() const { return class_count_ * kPerClass; }
    std::size_t class_count() const { return class_count_; }

    StateIndex index(const NodeState &s) const;
    NodeState state(StateIndex i) const;

    ClassId class_of(StateIndex i) const { return static_cast<ClassId>(i / kPerClass); }
    // Index of (0, 0, h, u).
    StateIndex reset_index(StateIndex i) const;

    friend bool operator==(const StateSpace &, const StateSpace &) = default;

  private:
    std::size_t class_count_ = 0;
};

// Throws DomainError on an empty class map.
StateSpace enumerate_states(const ClassMap &classes);

} // namespace mfnet
