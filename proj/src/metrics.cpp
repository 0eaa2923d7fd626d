#include "tecgp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tecgp/moo_core.hpp"

namespace tecgp {

FrontSnapshot::FrontSnapshot(std::vector<Point2> points, std::string label)
    : points_(std::move(points)), label_(std::move(label)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        for (std::size_t j = 0; j < points_.size(); ++j) {
            if (i != j && dominates(points_[i], points_[j])) {
                throw std::invalid_argument("FrontSnapshot '" + label_ + "': point " + std::to_string(i) +
                                            " dominates point " + std::to_string(j));
            }
        }
    }
}

FrontSnapshot FrontSnapshot::from_objectives(std::span<const ObjectiveVector> objectives, std::string label) {
    std::vector<Point2> points;
    points.reserve(objectives.size());
    for (const auto& o : objectives) points.push_back(o.point());
    return FrontSnapshot(std::move(points), std::move(label));
}

namespace {
double distance(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }
}  // namespace

double delta_metric(const FrontSnapshot& front, const std::optional<std::pair<Point2, Point2>>& extremes) {
    if (front.size() < 2) {
        throw std::invalid_argument("delta_metric: needs at least two points");
    }
    std::vector<Point2> sorted(front.points().begin(), front.points().end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> gaps;
    gaps.reserve(sorted.size() - 1);
    for (std::size_t i = 1; i < sorted.size(); ++i) gaps.push_back(distance(sorted[i - 1], sorted[i]));
    double mean_gap = 0.0;
    for (const double g : gaps) mean_gap += g;
    mean_gap /= static_cast<double>(gaps.size());

    double d_first = 0.0;
    double d_last = 0.0;
    if (extremes) {
        d_first = distance(extremes->first, sorted.front());
        d_last = distance(extremes->second, sorted.back());
    }
    double deviation = 0.0;
    for (const double g : gaps) deviation += std::abs(g - mean_gap);

    const double denominator = d_first + d_last + static_cast<double>(sorted.size()) * mean_gap;
    if (denominator == 0.0) return 0.0;
    return (d_first + d_last + deviation) / denominator;
}

double c_metric(const FrontSnapshot& a, const FrontSnapshot& b) {
    if (a.size() == 0) {
        throw std::invalid_argument("c_metric: first set is empty");
    }
    std::size_t covered = 0;
    for (const auto& x : a.points()) {
        const bool hit = std::any_of(b.points().begin(), b.points().end(),
                                     [&](const Point2& y) { return dominates(y, x); });
        if (hit) ++covered;
    }
    return static_cast<double>(covered) / static_cast<double>(a.size());
}

std::size_t nds(const FrontSnapshot& front) { return front.size(); }

RmseStats rmse_stats(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("rmse_stats: empty list");
    }
    RmseStats s;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (const double v : values) sum += v;
    const auto n = static_cast<double>(values.size());
    s.mean = sum / n;
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / n);
    // keep min <= mean <= max under rounding
    s.mean = std::clamp(s.mean, s.min, s.max);
    return s;
}

}  // namespace tecgp
