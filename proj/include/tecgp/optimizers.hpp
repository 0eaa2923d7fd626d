#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tecgp/dataio.hpp"
#include "tecgp/evo_ops.hpp"
#include "tecgp/fitness.hpp"
#include "tecgp/moo_core.hpp"
#include "tecgp/rng.hpp"

namespace tecgp {

enum class Algorithm { Sgp, Nsga2, Moead };

std::string_view algorithm_name(Algorithm algorithm);
/// Throws ConfigError for anything but "sgp", "nsga2" or "moead".
Algorithm parse_algorithm(std::string_view name);

struct SearchConfig {
    std::size_t population = 200;   // m: population size and number of subproblems
    std::size_t generations = 50;   // gen_max
    std::size_t neighborhood = 0;   // T; 0 selects max(2, ceil(0.1 * m))
    double sgp_epsilon = 1e-6;      // sGP: smallest best-RMSE gain that counts as progress
    std::size_t sgp_patience = 5;   // sGP: stalled generations before stopping
    std::size_t threads = 1;        // fitness evaluation workers
    OperatorConfig operators;

    std::size_t effective_neighborhood() const;
    void validate() const;
};

/// Scalarization weights (w1 for RMSE, w2 for size), non-negative, summing to 1.
using WeightVector = Point2;
/// Componentwise minimum of every objective vector seen so far.
using ReferencePoint = Point2;

/// w_i = (i / (m - 1), 1 - i / (m - 1)) for i = 0..m-1.
std::vector<WeightVector> uniform_weights(std::size_t m);

/// For each weight vector, the T nearest weight vectors by Euclidean distance
/// (itself included), nearest first; ties go to the lower index.
std::vector<std::vector<std::size_t>> neighborhoods(std::span<const WeightVector> weights, std::size_t t);

/// Tchebycheff scalarization max_j w_j * (f_j - z_j), to be minimized.
/// Throws std::invalid_argument when z exceeds f in any component.
double tchebycheff(const Point2& f, const WeightVector& w, const ReferencePoint& z);

ReferencePoint update_reference(const ReferencePoint& z, const Point2& f);

struct GenerationStats {
    std::size_t generation = 0;
    double best_fitness_rmse = 0.0;
    std::size_t archive_size = 0;
    std::size_t evaluations = 0;  // cumulative
    double elapsed_ms = 0.0;      // wall clock; not part of any persisted report
};

struct RunResult {
    ParetoArchive archive;        // external population; members carry validation objectives
    std::size_t best_index = 0;   // position of the selected model in archive.members()
    std::vector<GenerationStats> trace;  // one entry per executed generation
    std::size_t evaluations = 0;

    const Individual& best_model() const { return archive.members()[best_index]; }
};

/// Optional instrumentation. Hooks run on the calling thread in a
/// deterministic order.
struct RunHooks {
    /// Replaces ramped half-and-half initialization; padded with ramped trees
    /// or truncated to the population size.
    std::vector<ExprTree> initial_trees;
    /// Called once for every individual evaluated on the fitness set.
    std::function<void(const Individual&)> on_evaluate;
    /// Called after initialization (generation 0) and after every generation
    /// with the working population and current reference point.
    std::function<void(std::size_t generation, std::span<const Individual> population, const ReferencePoint& z)>
        on_generation;
};

/// GP with MOEA/D: Tchebycheff decomposition over m uniform weight vectors,
/// panmictic tournament keyed on the subproblem's scalarized value,
/// neighbourhood replacement, and an external Pareto archive from which the
/// lowest-validation-RMSE member is returned.
RunResult moead_run(const SearchConfig& config, const EncodedDataset& fitness_set,
                    const EncodedDataset& validation_set, Rng& rng, const RunHooks& hooks = {});

/// GP with NSGA-II survival (non-dominated rank, then crowding distance),
/// with the same operators, archive and final selection as moead_run.
RunResult nsga2_run(const SearchConfig& config, const EncodedDataset& fitness_set,
                    const EncodedDataset& validation_set, Rng& rng, const RunHooks& hooks = {});

/// Elitist single-objective GP on fitness-set RMSE (size breaks ties). Stops
/// after sgp_patience generations without sgp_epsilon progress, or at
/// gen_max. Returns the generation-best model with the lowest validation RMSE
/// as the only archive member.
RunResult sgp_run(const SearchConfig& config, const EncodedDataset& fitness_set,
                  const EncodedDataset& validation_set, Rng& rng, const RunHooks& hooks = {});

RunResult run_algorithm(Algorithm algorithm, const SearchConfig& config, const EncodedDataset& fitness_set,
                        const EncodedDataset& validation_set, Rng& rng, const RunHooks& hooks = {});

}  // namespace tecgp
