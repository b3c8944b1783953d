#include "mfnet/state.hpp"

#include "mfnet/error.hpp"

namespace mfnet {

void check_bins(const NodeState &s)
{
    if (s.p < 0 || s.p > kMaxPublications || s.c < 0 || s.c >= kCoauthorCategories ||
        static_cast<int>(s.h) >= kDecadeCount)
        throw DomainError("state (" + std::to_string(s.p) + "," + std::to_string(s.c) + ") outside bin ranges");
}

StateSpace::StateSpace(std::size_t class_count) : class_count_(class_count)
{
    if (class_count == 0)
        throw DomainError("state space needs at least one class");
}

StateIndex StateSpace::index(const NodeState &s) const
{
    check_bins(s);
    if (s.u >= class_count_)
        throw DomainError("class " + std::to_string(s.u) + " outside state space");
    const std::size_t i =
        ((static_cast<std::size_t>(s.u) * kDecadeCount + static_cast<std::size_t>(s.h)) * kCoauthorCategories +
         static_cast<std::size_t>(s.c)) *
            (kMaxPublications + 1) +
        static_cast<std::size_t>(s.p);
    return static_cast<StateIndex>(i);
}

NodeState StateSpace::state(StateIndex i) const
{
    if (i >= size())
        throw DomainError("state index out of range");
    NodeState s;
    std::size_t rest = i;
    s.p = static_cast<int>(rest % (kMaxPublications + 1));
    rest /= (kMaxPublications + 1);
    s.c = static_cast<int>(rest % kCoauthorCategories);
    rest /= kCoauthorCategories;
    s.h = static_cast<Decade>(rest % kDecadeCount);
    s.u = static_cast<ClassId>(rest / kDecadeCount);
    return s;
}

StateIndex StateSpace::reset_index(StateIndex i) const
{
    constexpr std::size_t block = static_cast<std::size_t>(kMaxPublications + 1) * kCoauthorCategories;
    return static_cast<StateIndex>(i / block * block);
}

StateSpace enumerate_states(const ClassMap &classes)
{
    if (classes.empty())
        throw DomainError("cannot enumerate states of an empty class map");
    return StateSpace(classes.size());
}

} // namespace mfnet
