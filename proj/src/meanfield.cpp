#include "mfnet/meanfield.hpp"

#include "mfnet/csv.hpp"
#include "mfnet/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

namespace mfnet {

void check_occupancy(const OccupancyVector &delta)
{
    double sum = 0.0;
    for (double f : delta.fractions) {
        if (!(f >= 0.0))
            throw DomainError("negative occupancy fraction");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw DomainError("occupancy does not sum to 1");
}

std::vector<double> class_masses(const StateSpace &space, std::span<const double> fractions)
{
    if (fractions.size() != space.size())
        throw MismatchError("occupancy size does not match the state space");
    std::vector<double> mass(space.class_count(), 0.0);
    for (std::size_t i = 0; i < fractions.size(); ++i)
        mass[i / StateSpace::kPerClass] += fractions[i];
    return mass;
}

CompiledKappa::CompiledKappa(const StateSpace &space, const KappaTable &table)
{
    table.validate();
    struct Pending {
        StateIndex a;
        StateIndex b;
        const KappaEntry *entry;
    };
    std::vector<Pending> pending;
    pending.reserve(table.entries.size());
    for (const auto &[key, entry] : table.entries)
        pending.push_back(Pending{space.index(key.first), space.index(key.second), &entry});
    std::sort(pending.begin(), pending.end(),
              [](const Pending &x, const Pending &y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });

    for (const auto &p : pending) {
        Key key{p.a, p.b, static_cast<std::uint32_t>(outcomes_.size()),
                static_cast<std::uint32_t>(p.entry->successors.size())};
        for (const auto &s : p.entry->successors)
            outcomes_.push_back(Outcome{space.index(s.a), space.index(s.b), s.probability});
        keys_.push_back(key);
    }
    keys_by_second_ = keys_;
    std::sort(keys_by_second_.begin(), keys_by_second_.end(),
              [](const Key &x, const Key &y) { return std::tie(x.b, x.a) < std::tie(y.b, y.a); });

    const std::size_t n = space.size();
    first_begin_.assign(n + 1, 0);
    second_begin_.assign(n + 1, 0);
    for (const auto &k : keys_)
        ++first_begin_[k.a + 1];
    for (const auto &k : keys_by_second_)
        ++second_begin_[k.b + 1];
    for (std::size_t i = 0; i < n; ++i) {
        first_begin_[i + 1] += first_begin_[i];
        second_begin_[i + 1] += second_begin_[i];
    }
}

std::span<const CompiledKappa::Outcome> CompiledKappa::joint(StateIndex a, StateIndex b) const
{
    const auto range = with_first(a);
    auto it = std::lower_bound(range.begin(), range.end(), b, [](const Key &k, StateIndex v) { return k.b < v; });
    if (it == range.end() || it->b != b)
        return {};
    return outcomes(*it);
}

std::span<const CompiledKappa::Key> CompiledKappa::with_first(StateIndex a) const
{
    if (first_begin_.empty())
        return {};
    return {keys_.data() + first_begin_[a], first_begin_[a + 1] - first_begin_[a]};
}

std::span<const CompiledKappa::Key> CompiledKappa::with_second(StateIndex b) const
{
    if (second_begin_.empty())
        return {};
    return {keys_by_second_.data() + second_begin_[b], second_begin_[b + 1] - second_begin_[b]};
}

InteractionModel make_model(const StateSpace &space, std::vector<double> weekly_gate,
                            std::vector<std::vector<double>> selection, const KappaTable &kappa)
{
    const auto k = space.class_count();
    if (weekly_gate.size() != k || selection.size() != k)
        throw MismatchError("gate or selection size differs from the class count");
    for (double g : weekly_gate)
        if (!(g >= 0.0 && g <= 1.0))
            throw DomainError("weekly gate outside [0, 1]");
    for (const auto &row : selection) {
        if (row.size() != k)
            throw MismatchError("selection matrix is not square");
        for (double w : row)
            if (!(w >= 0.0) || !std::isfinite(w))
                throw DomainError("selection weights must be finite and non-negative");
    }
    InteractionModel model;
    model.space = space;
    model.gate = std::move(weekly_gate);
    model.selection = std::move(selection);
    model.kappa = CompiledKappa(space, kappa);
    return model;
}

InteractionModel compile_model(const SmoothedModel &model, const ClassMap &classes, const ModelOptions &options)
{
    if (model.contact.class_count != classes.size())
        throw MismatchError("model was estimated for " + std::to_string(model.contact.class_count) +
                            " classes, class map has " + std::to_string(classes.size()));
    model.contact.validate();
    const auto space = enumerate_states(classes);
    const auto k = classes.size();
    std::vector<double> gate(k, 0.0);
    std::vector<std::vector<double>> selection(k, std::vector<double>(k, 0.0));
    for (ClassId u = 0; u < k; ++u) {
        const double rate = model.contact.row_sum(u);
        gate[u] = annual_to_weekly(-std::expm1(-rate), options.weekly_rule, options.weeks_per_year);
        for (ClassId v = 0; v < k; ++v)
            selection[u][v] = model.contact.weight(u, v);
    }
    return make_model(space, std::move(gate), std::move(selection), model.kappa);
}

PairingRates pairing_rates(const InteractionModel &model, std::span<const double> fractions)
{
    const auto k = model.space.class_count();
    PairingRates r;
    r.mass = class_masses(model.space, fractions);
    r.gate.assign(k, 0.0);
    r.selection.assign(k, std::vector<double>(k, 0.0));
    r.chosen_rate.assign(k, 0.0);
    for (std::size_t u = 0; u < k; ++u) {
        double sum = 0.0;
        for (std::size_t v = 0; v < k; ++v)
            if (r.mass[v] > 0.0)
                sum += model.selection[u][v];
        if (sum <= 0.0 || r.mass[u] <= 0.0)
            continue;
        r.gate[u] = model.gate[u];
        for (std::size_t v = 0; v < k; ++v)
            if (r.mass[v] > 0.0)
                r.selection[u][v] = model.selection[u][v] / sum;
    }
    for (std::size_t v = 0; v < k; ++v) {
        if (r.mass[v] <= 0.0)
            continue;
        double flow = 0.0;
        for (std::size_t u = 0; u < k; ++u)
            flow += r.mass[u] * r.gate[u] * r.selection[u][v];
        r.chosen_rate[v] = flow / r.mass[v];
    }
    return r;
}

TransitionOperator TransitionOperator::sparse(std::vector<std::vector<Entry>> columns)
{
    TransitionOperator m;
    m.n_ = columns.size();
    m.columns_ = std::move(columns);
    return m;
}

TransitionOperator TransitionOperator::dense(std::size_t n, std::vector<double> column_major)
{
    if (column_major.size() != n * n)
        throw MismatchError("dense operator storage has the wrong size");
    TransitionOperator m;
    m.n_ = n;
    m.dense_ = true;
    m.values_ = std::move(column_major);
    return m;
}

double TransitionOperator::at(StateIndex row, StateIndex col) const
{
    if (row >= n_ || col >= n_)
        throw MismatchError("operator index out of range");
    if (dense_)
        return values_[static_cast<std::size_t>(col) * n_ + row];
    for (const auto &e : columns_[col])
        if (e.row == row)
            return e.value;
    return 0.0;
}

double TransitionOperator::column_sum(StateIndex col) const
{
    if (col >= n_)
        throw MismatchError("operator index out of range");
    double sum = 0.0;
    if (dense_) {
        for (std::size_t r = 0; r < n_; ++r)
            sum += values_[static_cast<std::size_t>(col) * n_ + r];
    } else {
        for (const auto &e : columns_[col])
            sum += e.value;
    }
    return sum;
}

bool TransitionOperator::has_negative_entry() const
{
    if (dense_)
        return std::any_of(values_.begin(), values_.end(), [](double v) { return v < 0.0; });
    for (const auto &col : columns_)
        for (const auto &e : col)
            if (e.value < 0.0)
                return true;
    return false;
}

std::vector<double> TransitionOperator::apply(std::span<const double> x) const
{
    if (x.size() != n_)
        throw MismatchError("operator and vector sizes differ");
    std::vector<double> y(n_, 0.0);
    for (std::size_t col = 0; col < n_; ++col) {
        const double xc = x[col];
        if (xc == 0.0)
            continue;
        if (dense_) {
            const double *column = values_.data() + col * n_;
            for (std::size_t r = 0; r < n_; ++r)
                y[r] += column[r] * xc;
        } else {
            for (const auto &e : columns_[col])
                y[e.row] += e.value * xc;
        }
    }
    return y;
}

TransitionOperator build_operator(const OccupancyVector &delta, const InteractionModel &model,
                                  const OperatorOptions &options)
{
    const auto &space = model.space;
    const std::size_t n = space.size();
    if (delta.fractions.size() != n)
        throw MismatchError("occupancy size does not match the state space");
    const auto k = space.class_count();
    const auto rates = pairing_rates(model, delta.fractions);

    std::vector<double> survive(k);
    for (std::size_t u = 0; u < k; ++u)
        survive[u] = std::exp(-rates.chosen_rate[u]);

    // init[u][v]: weight of partner state B (class v) per unit of delta_B for an initiator of class u.
    // partner[x][u]: weight of initiator state B (class x) per unit of delta_B for a picked node of class u.
    std::vector<std::vector<double>> init(k, std::vector<double>(k, 0.0));
    std::vector<std::vector<double>> partner(k, std::vector<double>(k, 0.0));
    for (std::size_t u = 0; u < k; ++u)
        for (std::size_t v = 0; v < k; ++v) {
            if (rates.mass[v] > 0.0)
                init[u][v] = rates.gate[u] * survive[u] * rates.selection[u][v] * (1.0 - rates.gate[v]) *
                             survive[v] / rates.mass[v];
            if (rates.mass[v] > 0.0)
                partner[u][v] = (1.0 - rates.gate[v]) * survive[v] * rates.gate[u] * rates.selection[u][v] *
                                survive[u] / rates.mass[v];
        }

    const bool dense = n <= options.dense_threshold;
    std::vector<double> dense_values;
    std::vector<std::vector<TransitionOperator::Entry>> columns;
    if (dense)
        dense_values.assign(n * n, 0.0);
    else
        columns.resize(n);

    std::vector<TransitionOperator::Entry> scratch;
    for (StateIndex a = 0; a < n; ++a) {
        const ClassId u = space.class_of(a);
        scratch.clear();
        for (const auto &key : model.kappa.with_first(a)) {
            const double f = init[u][space.class_of(key.b)] * delta.fractions[key.b];
            if (f == 0.0)
                continue;
            for (const auto &o : model.kappa.outcomes(key))
                if (o.a != a)
                    scratch.push_back({o.a, f * o.probability});
        }
        for (const auto &key : model.kappa.with_second(a)) {
            const double f = partner[space.class_of(key.a)][u] * delta.fractions[key.a];
            if (f == 0.0)
                continue;
            for (const auto &o : model.kappa.outcomes(key))
                if (o.b != a)
                    scratch.push_back({o.b, f * o.probability});
        }
        std::sort(scratch.begin(), scratch.end(), [](const auto &x, const auto &y) { return x.row < y.row; });

        double moved = 0.0;
        for (const auto &e : scratch)
            moved += e.value;
        const double stay = 1.0 - moved;

        if (dense) {
            double *column = dense_values.data() + static_cast<std::size_t>(a) * n;
            for (const auto &e : scratch)
                column[e.row] += e.value;
            column[a] += stay;
        } else {
            auto &col = columns[a];
            bool placed = false;
            for (const auto &e : scratch) {
                if (!placed && e.row > a) {
                    col.push_back({a, stay});
                    placed = true;
                }
                if (!col.empty() && col.back().row == e.row)
                    col.back().value += e.value;
                else
                    col.push_back(e);
            }
            if (!placed)
                col.push_back({a, stay});
        }
    }
    return dense ? TransitionOperator::dense(n, std::move(dense_values))
                 : TransitionOperator::sparse(std::move(columns));
}

OccupancyVector step(const OccupancyVector &delta, const TransitionOperator &m)
{
    if (delta.fractions.size() != m.size())
        throw MismatchError("occupancy has " + std::to_string(delta.fractions.size()) + " states, operator " +
                            std::to_string(m.size()));
    return OccupancyVector{delta.week + 1, m.apply(delta.fractions)};
}

OccupancyVector initialize_year(const StateSpace &space, const OccupancyVector &delta)
{
    if (delta.fractions.size() != space.size())
        throw MismatchError("occupancy size does not match the state space");
    OccupancyVector out{delta.week, std::vector<double>(space.size(), 0.0)};
    for (StateIndex i = 0; i < space.size(); ++i)
        out.fractions[space.reset_index(i)] += delta.fractions[i];
    return out;
}

std::vector<OccupancyVector> run_trajectory(const OccupancyVector &initial, const InteractionModel &model,
                                            const TrajectoryOptions &options)
{
    if (options.years < 1)
        throw DomainError("trajectory needs at least one year");
    if (options.weeks_per_year < 1)
        throw DomainError("weeks per year must be positive");
    check_occupancy(initial);

    std::vector<OccupancyVector> snapshots;
    OccupancyVector delta = initial;
    for (int year = 0; year < options.years; ++year) {
        delta = initialize_year(model.space, delta);
        for (int week = 0; week < options.weeks_per_year; ++week) {
            const auto m = build_operator(delta, model, options.operator_options);
            delta = step(delta, m);
            if (options.cadence == SnapshotCadence::weekly || week + 1 == options.weeks_per_year)
                snapshots.push_back(delta);
        }
    }
    return snapshots;
}

void write_trajectory(const std::filesystem::path &path, const StateSpace &space,
                      std::span<const OccupancyVector> snapshots)
{
    auto out = csv::open_output(path);
    out << "week,p,c,h,u,fraction\n";
    for (const auto &snap : snapshots) {
        if (snap.fractions.size() != space.size())
            throw MismatchError("snapshot size does not match the state space");
        for (StateIndex i = 0; i < space.size(); ++i) {
            if (snap.fractions[i] == 0.0)
                continue;
            const auto s = space.state(i);
            out << snap.week << ',' << s.p << ',' << s.c << ',' << decade_label(s.h) << ',' << s.u << ','
                << csv::format_double(snap.fractions[i]) << '\n';
        }
    }
}

std::vector<OccupancyVector> read_trajectory(const std::filesystem::path &path, const StateSpace &space)
{
    const auto table = csv::Table::read(path);
    const std::size_t cols[] = {table.column("week"), table.column("p"), table.column("c"),
                                table.column("h"),    table.column("u"), table.column("fraction")};
    std::vector<OccupancyVector> snapshots;
    for (const auto &row : table.rows()) {
        long long ints[5];
        for (int i = 0; i < 5; ++i) {
            const auto &f = row.fields[cols[i]];
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), ints[i]);
            if (ec != std::errc() || ptr != f.data() + f.size())
                throw ParseError(table.source(), row.line, "invalid integer '" + f + "'");
        }
        const auto &ftext = row.fields[cols[5]];
        double fraction = 0.0;
        auto [ptr, ec] = std::from_chars(ftext.data(), ftext.data() + ftext.size(), fraction);
        if (ec != std::errc() || ptr != ftext.data() + ftext.size())
            throw ParseError(table.source(), row.line, "invalid fraction '" + ftext + "'");
        if (ints[4] < 0 || static_cast<std::size_t>(ints[4]) >= space.class_count())
            throw MismatchError("trajectory references class " + std::to_string(ints[4]) + " but the class map has " +
                                std::to_string(space.class_count()) + " classes");
        const auto h = decade_from_label(static_cast<int>(ints[3]));
        if (!h)
            throw ParseError(table.source(), row.line, "invalid decade");
        NodeState s{static_cast<int>(ints[1]), static_cast<int>(ints[2]), *h, static_cast<ClassId>(ints[4])};
        StateIndex idx;
        try {
            idx = space.index(s);
        } catch (const DomainError &e) {
            throw ParseError(table.source(), row.line, e.what());
        }
        const int week = static_cast<int>(ints[0]);
        if (snapshots.empty() || snapshots.back().week != week) {
            if (!snapshots.empty() && week < snapshots.back().week)
                throw ParseError(table.source(), row.line, "weeks out of order");
            snapshots.push_back(OccupancyVector{week, std::vector<double>(space.size(), 0.0)});
        }
        snapshots.back().fractions[idx] = fraction;
    }
    return snapshots;
}

} // namespace mfnet
