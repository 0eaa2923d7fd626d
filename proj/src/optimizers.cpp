#include "tecgp/optimizers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "tecgp/errors.hpp"

namespace tecgp {

std::string_view algorithm_name(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::Sgp: return "sgp";
        case Algorithm::Nsga2: return "nsga2";
        case Algorithm::Moead: return "moead";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "sgp") return Algorithm::Sgp;
    if (name == "nsga2") return Algorithm::Nsga2;
    if (name == "moead") return Algorithm::Moead;
    throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected sgp, nsga2 or moead)");
}

std::size_t SearchConfig::effective_neighborhood() const {
    if (neighborhood != 0) return neighborhood;
    const auto tenth = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(population)));
    return std::min(population, std::max<std::size_t>(2, tenth));
}

void SearchConfig::validate() const {
    if (population < 2) {
        throw ConfigError("population must be >= 2");
    }
    if (neighborhood > population) {
        throw ConfigError("neighborhood must not exceed the population size");
    }
    if (!(sgp_epsilon >= 0.0)) {
        throw ConfigError("sgp_epsilon must be >= 0");
    }
    if (sgp_patience < 1) {
        throw ConfigError("sgp_patience must be >= 1");
    }
    if (threads < 1) {
        throw ConfigError("threads must be >= 1");
    }
    operators.validate();
}

std::vector<WeightVector> uniform_weights(std::size_t m) {
    if (m < 2) {
        throw std::invalid_argument("uniform_weights: m must be >= 2");
    }
    std::vector<WeightVector> weights;
    weights.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double w1 = static_cast<double>(i) / static_cast<double>(m - 1);
        weights.push_back({w1, 1.0 - w1});
    }
    return weights;
}

std::vector<std::vector<std::size_t>> neighborhoods(std::span<const WeightVector> weights, std::size_t t) {
    if (t < 1 || t > weights.size()) {
        throw std::invalid_argument("neighborhoods: T must lie in [1, m]");
    }
    std::vector<std::vector<std::size_t>> result;
    result.reserve(weights.size());
    std::vector<std::pair<double, std::size_t>> by_distance(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        for (std::size_t j = 0; j < weights.size(); ++j) {
            const double d = std::hypot(weights[i][0] - weights[j][0], weights[i][1] - weights[j][1]);
            by_distance[j] = {d, j};
        }
        std::sort(by_distance.begin(), by_distance.end());
        std::vector<std::size_t> nearest;
        for (std::size_t k = 0; k < t; ++k) nearest.push_back(by_distance[k].second);
        result.push_back(std::move(nearest));
    }
    return result;
}

double tchebycheff(const Point2& f, const WeightVector& w, const ReferencePoint& z) {
    if (z[0] > f[0] || z[1] > f[1]) {
        throw std::invalid_argument("tchebycheff: reference point is not below the objective vector");
    }
    return std::max(w[0] * (f[0] - z[0]), w[1] * (f[1] - z[1]));
}

ReferencePoint update_reference(const ReferencePoint& z, const Point2& f) {
    return {std::min(z[0], f[0]), std::min(z[1], f[1])};
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_inputs(const SearchConfig& config, const EncodedDataset& fitness_set,
                  const EncodedDataset& validation_set) {
    config.validate();
    if (fitness_set.empty()) {
        throw DataError("fitness-evaluation set is empty");
    }
    if (validation_set.empty()) {
        throw DataError("validation set is empty");
    }
}

std::vector<Individual> evaluate_and_report(std::vector<ExprTree> trees, const EncodedDataset& fitness_set,
                                            const SearchConfig& config, const RunHooks& hooks) {
    auto evaluated = evaluate_population(std::move(trees), fitness_set, config.threads);
    if (hooks.on_evaluate) {
        for (const auto& ind : evaluated) hooks.on_evaluate(ind);
    }
    return evaluated;
}

std::vector<Individual> initial_population(const SearchConfig& config, const EncodedDataset& fitness_set,
                                           Rng& rng, const RunHooks& hooks) {
    const std::size_t m = config.population;
    std::vector<ExprTree> trees;
    if (hooks.initial_trees.empty()) {
        trees = ramped_half_and_half(rng, m, config.operators.init_depth, config.operators.primitives);
    } else {
        trees.assign(hooks.initial_trees.begin(),
                     hooks.initial_trees.begin() + static_cast<std::ptrdiff_t>(std::min(m, hooks.initial_trees.size())));
        if (trees.size() < m) {
            auto extra = ramped_half_and_half(rng, m - trees.size(), config.operators.init_depth,
                                              config.operators.primitives);
            trees.insert(trees.end(), extra.begin(), extra.end());
        }
    }
    return evaluate_and_report(std::move(trees), fitness_set, config, hooks);
}

double best_rmse(std::span<const Individual> individuals) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ind : individuals) best = std::min(best, ind.fitness.rmse);
    return best;
}

/// Steps 4-5: validate every archive member, pick the lowest validation RMSE
/// (then smaller tree, then earlier insertion).
RunResult finish_run(ParetoArchive archive, std::vector<GenerationStats> trace, std::size_t evaluations,
                     const EncodedDataset& validation_set) {
    RunResult result;
    result.trace = std::move(trace);
    result.evaluations = evaluations;
    auto members = archive.members();
    for (auto& member : members) {
        member.validation = objective_vector(member.tree, validation_set);
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < members.size(); ++k) {
        if (std::tie(members[k].validation->rmse, members[k].fitness.size) <
            std::tie(members[best].validation->rmse, members[best].fitness.size)) {
            best = k;
        }
    }
    result.best_index = best;
    result.archive = std::move(archive);
    return result;
}

}  // namespace

// ---------------------------------------------------------------------------
// MOEA/D

RunResult moead_run(const SearchConfig& config, const EncodedDataset& fitness_set,
                    const EncodedDataset& validation_set, Rng& rng, const RunHooks& hooks) {
    check_inputs(config, fitness_set, validation_set);
    const auto start = Clock::now();
    const std::size_t m = config.population;
    const auto weights = uniform_weights(m);
    const auto neighbors = neighborhoods(weights, config.effective_neighborhood());

    std::vector<Individual> population = initial_population(config, fitness_set, rng, hooks);
    std::size_t evaluations = population.size();

    ParetoArchive archive;
    ReferencePoint z = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (const auto& ind : population) {
        z = update_reference(z, ind.fitness.point());
        archive.update(ind);
    }
    if (hooks.on_generation) hooks.on_generation(0, population, z);

    std::vector<GenerationStats> trace;
    for (std::size_t gen = 1; gen <= config.generations; ++gen) {
        // Offspring for every subproblem are bred from the population and
        // reference point as they stood at the start of the generation.
        std::vector<ExprTree> children;
        children.reserve(m);
        for (std::size_t i = 0; i < m; ++i) {
            const WeightVector& w = weights[i];
            const std::size_t parent = tournament_select(
                std::span<const Individual>(population),
                [&](const Individual& ind) { return tchebycheff(ind.fitness.point(), w, z); }, rng,
                config.operators);
            children.push_back(mutate(population[parent].tree, rng, config.operators));
        }
        const auto offspring = evaluate_and_report(std::move(children), fitness_set, config, hooks);
        evaluations += offspring.size();

        for (std::size_t i = 0; i < m; ++i) {
            const Individual& y = offspring[i];
            z = update_reference(z, y.fitness.point());
            for (const std::size_t j : neighbors[i]) {
                if (tchebycheff(y.fitness.point(), weights[j], z) <
                    tchebycheff(population[j].fitness.point(), weights[j], z)) {
                    population[j] = y;
                }
            }
            archive.update(y);
        }

        trace.push_back({gen, best_rmse(archive.members()), archive.size(), evaluations, elapsed_ms(start)});
        if (hooks.on_generation) hooks.on_generation(gen, population, z);
    }
    return finish_run(std::move(archive), std::move(trace), evaluations, validation_set);
}

// ---------------------------------------------------------------------------
// NSGA-II

namespace {

struct RankCrowding {
    std::vector<std::size_t> rank;
    std::vector<double> crowding;
};

RankCrowding rank_and_crowd(std::span<const Individual> population) {
    std::vector<Point2> points;
    points.reserve(population.size());
    for (const auto& ind : population) points.push_back(ind.fitness.point());
    RankCrowding rc{std::vector<std::size_t>(population.size()), std::vector<double>(population.size())};
    const auto fronts = fast_nondominated_sort(points);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        std::vector<Point2> front_points;
        for (const std::size_t idx : fronts[f]) front_points.push_back(points[idx]);
        const auto distances = crowding_distance(front_points);
        for (std::size_t k = 0; k < fronts[f].size(); ++k) {
            rc.rank[fronts[f][k]] = f;
            rc.crowding[fronts[f][k]] = distances[k];
        }
    }
    return rc;
}

/// Best `count` of `merged` by non-dominated rank, the last admitted front
/// truncated by descending crowding distance (lower index first on ties).
std::vector<Individual> survive(std::vector<Individual> merged, std::size_t count) {
    std::vector<Point2> points;
    points.reserve(merged.size());
    for (const auto& ind : merged) points.push_back(ind.fitness.point());
    std::vector<std::size_t> chosen;
    for (const auto& front : fast_nondominated_sort(points)) {
        if (chosen.size() + front.size() <= count) {
            chosen.insert(chosen.end(), front.begin(), front.end());
            if (chosen.size() == count) break;
            continue;
        }
        std::vector<Point2> front_points;
        for (const std::size_t idx : front) front_points.push_back(points[idx]);
        const auto distances = crowding_distance(front_points);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return distances[a] > distances[b]; });
        for (std::size_t k = 0; chosen.size() < count; ++k) chosen.push_back(front[order[k]]);
        break;
    }
    std::vector<Individual> survivors;
    survivors.reserve(count);
    for (const std::size_t idx : chosen) survivors.push_back(std::move(merged[idx]));
    return survivors;
}

}  // namespace

RunResult nsga2_run(const SearchConfig& config, const EncodedDataset& fitness_set,
                    const EncodedDataset& validation_set, Rng& rng, const RunHooks& hooks) {
    check_inputs(config, fitness_set, validation_set);
    const auto start = Clock::now();
    const std::size_t m = config.population;

    std::vector<Individual> population = initial_population(config, fitness_set, rng, hooks);
    std::size_t evaluations = population.size();
    ParetoArchive archive;
    ReferencePoint z = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (const auto& ind : population) {
        archive.update(ind);
        z = update_reference(z, ind.fitness.point());
    }
    if (hooks.on_generation) hooks.on_generation(0, population, z);

    std::vector<GenerationStats> trace;
    for (std::size_t gen = 1; gen <= config.generations; ++gen) {
        const RankCrowding rc = rank_and_crowd(population);
        std::vector<ExprTree> children;
        children.reserve(m);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t parent = tournament_select(
                std::span<const Individual>(population),
                [&](const Individual& ind) {
                    const auto k = static_cast<std::size_t>(&ind - population.data());
                    return std::pair<std::size_t, double>(rc.rank[k], -rc.crowding[k]);
                },
                rng, config.operators);
            children.push_back(mutate(population[parent].tree, rng, config.operators));
        }
        auto offspring = evaluate_and_report(std::move(children), fitness_set, config, hooks);
        evaluations += offspring.size();
        for (const auto& y : offspring) {
            archive.update(y);
            z = update_reference(z, y.fitness.point());
        }

        std::vector<Individual> merged = std::move(population);
        merged.insert(merged.end(), std::make_move_iterator(offspring.begin()),
                      std::make_move_iterator(offspring.end()));
        population = survive(std::move(merged), m);

        trace.push_back({gen, best_rmse(archive.members()), archive.size(), evaluations, elapsed_ms(start)});
        if (hooks.on_generation) hooks.on_generation(gen, population, z);
    }
    return finish_run(std::move(archive), std::move(trace), evaluations, validation_set);
}

// ---------------------------------------------------------------------------
// Single-objective GP

namespace {

std::size_t elite_index(std::span<const Individual> population) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < population.size(); ++k) {
        if (std::tie(population[k].fitness.rmse, population[k].fitness.size) <
            std::tie(population[best].fitness.rmse, population[best].fitness.size)) {
            best = k;
        }
    }
    return best;
}

}  // namespace

RunResult sgp_run(const SearchConfig& config, const EncodedDataset& fitness_set,
                  const EncodedDataset& validation_set, Rng& rng, const RunHooks& hooks) {
    check_inputs(config, fitness_set, validation_set);
    const auto start = Clock::now();
    const std::size_t m = config.population;

    std::vector<Individual> population = initial_population(config, fitness_set, rng, hooks);
    std::size_t evaluations = population.size();
    ReferencePoint z = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (const auto& ind : population) z = update_reference(z, ind.fitness.point());
    if (hooks.on_generation) hooks.on_generation(0, population, z);

    // Generation-best models compete on validation RMSE, then size; the
    // earliest generation wins full ties.
    Individual selected = population[elite_index(population)];
    selected.validation = objective_vector(selected.tree, validation_set);
    auto consider = [&](const Individual& candidate) {
        const ObjectiveVector v = objective_vector(candidate.tree, validation_set);
        if (std::tie(v.rmse, candidate.fitness.size) < std::tie(selected.validation->rmse, selected.fitness.size)) {
            selected = candidate;
            selected.validation = v;
        }
    };

    std::vector<GenerationStats> trace;
    double previous_best = population[elite_index(population)].fitness.rmse;
    std::size_t stalled = 0;
    for (std::size_t gen = 1; gen <= config.generations && stalled < config.sgp_patience; ++gen) {
        const std::size_t elite = elite_index(population);
        std::vector<ExprTree> children;
        children.reserve(m - 1);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const std::size_t parent = tournament_select(
                std::span<const Individual>(population), [](const Individual& ind) { return ind.fitness.rmse; }, rng,
                config.operators);
            children.push_back(mutate(population[parent].tree, rng, config.operators));
        }
        auto offspring = evaluate_and_report(std::move(children), fitness_set, config, hooks);
        evaluations += offspring.size();
        for (const auto& y : offspring) z = update_reference(z, y.fitness.point());

        std::vector<Individual> next;
        next.reserve(m);
        next.push_back(std::move(population[elite]));
        next.insert(next.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
        population = std::move(next);

        const Individual& generation_best = population[elite_index(population)];
        consider(generation_best);
        const double best = generation_best.fitness.rmse;
        stalled = (previous_best - best < config.sgp_epsilon) ? stalled + 1 : 0;
        previous_best = best;

        trace.push_back({gen, best, 1, evaluations, elapsed_ms(start)});
        if (hooks.on_generation) hooks.on_generation(gen, population, z);
    }

    RunResult result;
    result.archive.update(selected);
    result.best_index = 0;
    result.trace = std::move(trace);
    result.evaluations = evaluations;
    return result;
}

RunResult run_algorithm(Algorithm algorithm, const SearchConfig& config, const EncodedDataset& fitness_set,
                        const EncodedDataset& validation_set, Rng& rng, const RunHooks& hooks) {
    switch (algorithm) {
        case Algorithm::Sgp: return sgp_run(config, fitness_set, validation_set, rng, hooks);
        case Algorithm::Nsga2: return nsga2_run(config, fitness_set, validation_set, rng, hooks);
        case Algorithm::Moead: return moead_run(config, fitness_set, validation_set, rng, hooks);
    }
    throw std::logic_error("run_algorithm: unknown algorithm");
}

}  // namespace tecgp
