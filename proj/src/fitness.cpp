#include "tecgp/fitness.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace tecgp {

double rmse(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size()) {
        throw std::invalid_argument("rmse: prediction and target counts differ");
    }
    if (targets.empty()) {
        throw std::invalid_argument("rmse: empty dataset");
    }
    // Neumaier summation of squared errors.
    double sum = 0.0;
    double compensation = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double err = predictions[i] - targets[i];
        const double term = err * err;
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term)) {
            compensation += (sum - t) + term;
        } else {
            compensation += (term - t) + sum;
        }
        sum = t;
    }
    const double value = std::sqrt((sum + compensation) / static_cast<double>(targets.size()));
    return std::isfinite(value) ? value : kOverflowRmse;
}

double rmse(const ExprTree& tree, const EncodedDataset& data) {
    if (data.empty()) {
        throw std::invalid_argument("rmse: empty dataset");
    }
    std::vector<double> predictions(data.size());
    tree.evaluate(data.columns(), predictions);
    return rmse(predictions, data.targets());
}

ObjectiveVector objective_vector(const ExprTree& tree, const EncodedDataset& data) {
    return {rmse(tree, data), tree.size()};
}

Individual make_individual(ExprTree tree, const EncodedDataset& fitness_set) {
    const ObjectiveVector objectives = objective_vector(tree, fitness_set);
    return {std::move(tree), objectives, std::nullopt};
}

std::vector<Individual> evaluate_population(std::vector<ExprTree> trees, const EncodedDataset& fitness_set,
                                            std::size_t threads) {
    if (fitness_set.empty()) {
        throw std::invalid_argument("evaluate_population: empty fitness set");
    }
    std::vector<ObjectiveVector> objectives(trees.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, trees.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < trees.size(); ++i) objectives[i] = objective_vector(trees[i], fitness_set);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < trees.size(); i = next++) {
                    objectives[i] = objective_vector(trees[i], fitness_set);
                }
            });
        }
    }
    std::vector<Individual> out;
    out.reserve(trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) {
        out.push_back({std::move(trees[i]), objectives[i], std::nullopt});
    }
    return out;
}

}  // namespace tecgp
