#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tecgp/fitness.hpp"

namespace tecgp {

/// A labelled set of mutually non-dominated objective points.
class FrontSnapshot {
public:
    /// Throws std::invalid_argument if any point dominates another.
    FrontSnapshot(std::vector<Point2> points, std::string label = {});

    static FrontSnapshot from_objectives(std::span<const ObjectiveVector> objectives, std::string label = {});

    std::span<const Point2> points() const { return points_; }
    const std::string& label() const { return label_; }
    std::size_t size() const { return points_.size(); }

private:
    std::vector<Point2> points_;
    std::string label_;
};

/// Spread indicator (d_f + d_l + sum|d_j - d_mean|) / (d_f + d_l + |A| * d_mean)
/// over consecutive Euclidean gaps d_j of the front sorted by first objective.
/// d_f and d_l are the distances from the front's two end points to the given
/// extremes (first extreme pairs with the smallest-RMSE end), or 0 without
/// extremes. A front whose denominator vanishes (all points coincide) scores 0.
/// Throws std::invalid_argument for fewer than two points.
double delta_metric(const FrontSnapshot& front, const std::optional<std::pair<Point2, Point2>>& extremes = {});

/// Coverage C(A, B): fraction of A dominated by at least one point of B.
/// Throws std::invalid_argument when A is empty.
double c_metric(const FrontSnapshot& a, const FrontSnapshot& b);

/// Number of non-dominated solutions, |A|.
std::size_t nds(const FrontSnapshot& front);

struct RmseStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double std = 0.0;  // population form, divisor n
};

/// Throws std::invalid_argument on an empty list.
RmseStats rmse_stats(std::span<const double> values);

}  // namespace tecgp
