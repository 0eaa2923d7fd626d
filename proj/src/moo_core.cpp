#include "tecgp/moo_core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace tecgp {

bool ParetoArchive::update(const Individual& y) {
    for (const auto& m : members_) {
        if (dominates(m.fitness, y.fitness)) return false;
        if (m.fitness == y.fitness && m.tree == y.tree) return false;
    }
    std::erase_if(members_, [&](const Individual& m) { return dominates(y.fitness, m.fitness); });
    members_.push_back(y);
    return true;
}

std::vector<Point2> ParetoArchive::points() const {
    std::vector<Point2> out;
    out.reserve(members_.size());
    for (const auto& m : members_) out.push_back(m.fitness.point());
    return out;
}

std::pair<ParetoArchive, bool> archive_update(ParetoArchive archive, const Individual& y) {
    const bool accepted = archive.update(y);
    return {std::move(archive), accepted};
}

std::vector<std::size_t> nondominated_filter(std::span<const Point2> points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    // Sweep groups of equal first objective in ascending order. Within a group
    // only the minimum second objective can survive, and only if it beats every
    // second objective seen in earlier groups.
    std::vector<std::size_t> kept;
    double best_second = std::numeric_limits<double>::infinity();
    std::size_t g = 0;
    while (g < order.size()) {
        std::size_t h = g;
        while (h < order.size() && points[order[h]][0] == points[order[g]][0]) ++h;
        const double group_min = points[order[g]][1];
        if (group_min < best_second) {
            for (std::size_t k = g; k < h && points[order[k]][1] == group_min; ++k) kept.push_back(order[k]);
            best_second = group_min;
        }
        g = h;
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const Point2> points) {
    const std::size_t n = points.size();
    std::vector<std::vector<std::size_t>> dominated_by_me(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts;

    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            if (dominates(points[p], points[q])) {
                dominated_by_me[p].push_back(q);
            } else if (dominates(points[q], points[p])) {
                ++domination_count[p];
            }
        }
        if (domination_count[p] == 0) current.push_back(p);
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (const std::size_t p : current) {
            for (const std::size_t q : dominated_by_me[p]) {
                if (--domination_count[q] == 0) next.push_back(q);
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<const Point2> front) {
    const std::size_t n = front.size();
    std::vector<double> distance(n, 0.0);
    if (n == 0) return distance;
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> order(n);
    for (std::size_t objective = 0; objective < 2; ++objective) {
        const std::size_t other = 1 - objective;
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (front[a][objective] != front[b][objective]) return front[a][objective] < front[b][objective];
            return front[a][other] < front[b][other];
        });
        distance[order.front()] = inf;
        distance[order.back()] = inf;
        const double range = front[order.back()][objective] - front[order.front()][objective];
        if (range <= 0.0) continue;
        for (std::size_t k = 1; k + 1 < n; ++k) {
            const double gap = front[order[k + 1]][objective] - front[order[k - 1]][objective];
            distance[order[k]] += gap / range;
        }
    }
    return distance;
}

}  // namespace tecgp
