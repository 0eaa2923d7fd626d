#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tecgp/fitness.hpp"

namespace tecgp {

/// Pareto dominance for minimization: u is no worse in both objectives and
/// strictly better in at least one.
constexpr bool dominates(const Point2& u, const Point2& v) {
    return u[0] <= v[0] && u[1] <= v[1] && (u[0] < v[0] || u[1] < v[1]);
}

inline bool dominates(const ObjectiveVector& u, const ObjectiveVector& v) { return dominates(u.point(), v.point()); }

/// External population: every non-dominated individual seen so far, judged on
/// fitness-set objectives. Members with equal objective vectors are all kept
/// unless their trees are identical too.
class ParetoArchive {
public:
    /// Inserts y unless some member dominates it or an identical
    /// (tree, objectives) member exists; evicts every member y dominates.
    /// Returns whether y was inserted.
    bool update(const Individual& y);

    std::span<const Individual> members() const { return members_; }
    std::span<Individual> members() { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

    std::vector<Point2> points() const;

private:
    std::vector<Individual> members_;
};

/// Value-returning form of ParetoArchive::update.
std::pair<ParetoArchive, bool> archive_update(ParetoArchive archive, const Individual& y);

/// Indices (ascending) of the points not dominated by any other point.
std::vector<std::size_t> nondominated_filter(std::span<const Point2> points);

/// Deb's fast non-dominated sort. Front 0 is the non-dominated set; each
/// front lists indices in ascending order; fronts partition all indices.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const Point2> points);

/// NSGA-II crowding distance of each point within one front. Per objective,
/// the two extremes get +infinity and interior points add the neighbour gap
/// normalised by the objective's range (0 when the range is 0).
std::vector<double> crowding_distance(std::span<const Point2> front);

}  // namespace tecgp
