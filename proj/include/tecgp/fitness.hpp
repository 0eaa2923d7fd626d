#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tecgp/dataio.hpp"
#include "tecgp/exprtree.hpp"

namespace tecgp {

/// A point in a two-objective (minimization) space.
using Point2 = std::array<double, 2>;

/// (RMSE on a dataset, tree size): the two objectives every optimizer minimizes.
struct ObjectiveVector {
    double rmse = 0.0;
    std::size_t size = 1;

    Point2 point() const { return {rmse, static_cast<double>(size)}; }

    friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

/// RMSE reported for a model whose predictions overflow to a non-finite value.
/// Large enough to lose every comparison, small enough that weighted
/// differences and Euclidean gaps of such values stay finite.
inline constexpr double kOverflowRmse = 1e300;

/// A model together with its objectives on the fitness-evaluation set and,
/// once computed, on the validation set.
struct Individual {
    ExprTree tree;
    ObjectiveVector fitness;
    std::optional<ObjectiveVector> validation;
};

/// sqrt(mean((prediction - target)^2)), accumulated in row order with
/// Neumaier compensation. Throws std::invalid_argument on empty or mismatched
/// input. Returns kOverflowRmse when any prediction is non-finite.
double rmse(std::span<const double> predictions, std::span<const double> targets);

double rmse(const ExprTree& tree, const EncodedDataset& data);

ObjectiveVector objective_vector(const ExprTree& tree, const EncodedDataset& data);

Individual make_individual(ExprTree tree, const EncodedDataset& fitness_set);

/// Evaluates every tree on `fitness_set`, spreading the work over `threads`
/// workers. Each evaluation is sequential, so results do not depend on the
/// thread count.
std::vector<Individual> evaluate_population(std::vector<ExprTree> trees, const EncodedDataset& fitness_set,
                                            std::size_t threads = 1);

}  // namespace tecgp
