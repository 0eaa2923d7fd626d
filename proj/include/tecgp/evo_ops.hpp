#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

#include "tecgp/exprtree.hpp"
#include "tecgp/fitness.hpp"
#include "tecgp/rng.hpp"

namespace tecgp {

struct OperatorConfig {
    std::size_t tournament_size = 7;
    double p_subtree = 0.6;       // probability of subtree (vs point) mutation
    std::size_t max_depth = 12;   // hard depth limit during evolution
    std::size_t init_depth = 6;   // ramped half-and-half maximum depth
    PrimitiveSet primitives;

    void validate() const;
};

/// Tournament of config.tournament_size draws (with replacement) from
/// `population`; returns the index of the winner.
///
/// The winner has the lowest key(individual). Equal keys go to the smaller
/// tree, then to the earlier draw. Key may return any type ordered by `<`.
template <typename KeyFn>
std::size_t tournament_select(std::span<const Individual> population, KeyFn&& key, Rng& rng,
                              const OperatorConfig& config) {
    if (population.empty()) {
        throw std::invalid_argument("tournament_select: empty population");
    }
    std::size_t best = rng.uniform_index(population.size());
    auto best_key = key(population[best]);
    for (std::size_t draw = 1; draw < config.tournament_size; ++draw) {
        const std::size_t candidate = rng.uniform_index(population.size());
        auto candidate_key = key(population[candidate]);
        const bool better = candidate_key < best_key ||
                            (!(best_key < candidate_key) &&
                             population[candidate].fitness.size < population[best].fitness.size);
        if (better) {
            best = candidate;
            best_key = std::move(candidate_key);
        }
    }
    return best;
}

/// Replaces a uniformly chosen node with a grow tree whose depth fits in the
/// remaining budget max_depth - depth(node).
ExprTree subtree_mutation(const ExprTree& tree, Rng& rng, const OperatorConfig& config);

/// Replaces a uniformly chosen node's symbol with a different symbol of the
/// same arity, chosen uniformly. Shape, size and depth are unchanged.
ExprTree point_mutation(const ExprTree& tree, Rng& rng, const OperatorConfig& config);

enum class MutationKind { Subtree, Point };

/// Subtree mutation with probability config.p_subtree, point mutation otherwise.
ExprTree mutate(const ExprTree& tree, Rng& rng, const OperatorConfig& config, MutationKind* applied = nullptr);

}  // namespace tecgp
