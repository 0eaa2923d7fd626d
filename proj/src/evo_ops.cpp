#include "tecgp/evo_ops.hpp"

#include "tecgp/errors.hpp"

namespace tecgp {

void OperatorConfig::validate() const {
    if (tournament_size < 1) {
        throw ConfigError("tournament_size must be >= 1");
    }
    if (!(p_subtree >= 0.0 && p_subtree <= 1.0)) {
        throw ConfigError("p_subtree must lie in [0, 1]");
    }
    if (init_depth < 1 || max_depth < init_depth) {
        throw ConfigError("depth limits must satisfy max_depth >= init_depth >= 1");
    }
    primitives.validate();
}

ExprTree subtree_mutation(const ExprTree& tree, Rng& rng, const OperatorConfig& config) {
    const std::size_t target = rng.uniform_index(tree.size());
    const std::size_t node_depth = tree.node_depths()[target];
    const std::size_t budget = config.max_depth > node_depth ? config.max_depth - node_depth : 0;
    return tree.replace_subtree(target, generate_grow(rng, budget, config.primitives));
}

ExprTree point_mutation(const ExprTree& tree, Rng& rng, const OperatorConfig& config) {
    const std::size_t target = rng.uniform_index(tree.size());
    const Node& current = tree.node(target);
    const PrimitiveSet& ps = config.primitives;

    if (current.is_function()) {
        // three alternatives: skip over the current operator
        auto pick = static_cast<std::size_t>(rng.uniform_index(kFunctionKinds.size() - 1));
        if (pick >= static_cast<std::size_t>(current.kind)) ++pick;
        return tree.replace_node(target, Node::function(kFunctionKinds[pick]));
    }

    if (current.kind == NodeKind::Const) {
        // a constant becomes one of the variables
        const auto var = rng.uniform_index(kFeatureCount);
        return tree.replace_node(target, Node::variable(static_cast<Feature>(var)));
    }

    // a variable becomes another variable or, when enabled, a fresh constant
    auto pick = static_cast<std::size_t>(rng.uniform_index(ps.terminal_slots() - 1));
    if (pick >= current.var) ++pick;
    if (pick < kFeatureCount) {
        return tree.replace_node(target, Node::variable(static_cast<Feature>(pick)));
    }
    return tree.replace_node(target, Node::constant(rng.uniform(ps.constant_min, ps.constant_max)));
}

ExprTree mutate(const ExprTree& tree, Rng& rng, const OperatorConfig& config, MutationKind* applied) {
    const bool subtree = rng.bernoulli(config.p_subtree);
    if (applied != nullptr) *applied = subtree ? MutationKind::Subtree : MutationKind::Point;
    return subtree ? subtree_mutation(tree, rng, config) : point_mutation(tree, rng, config);
}

}  // namespace tecgp
