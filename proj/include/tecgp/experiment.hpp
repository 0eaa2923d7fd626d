#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tecgp/config.hpp"
#include "tecgp/dataio.hpp"
#include "tecgp/metrics.hpp"
#include "tecgp/optimizers.hpp"

namespace tecgp {

// ---------------------------------------------------------------------------
// Run bundles

/// Writes a RunResult as a directory:
///   archive.csv  rmse_fitness,size,rmse_validation,prefix_expression
///   model.txt    selected model in prefix notation
///   trace.csv    generation,best_fitness_rmse,archive_size,evaluations
///   config.txt   tool version line followed by `config_text`
/// Wall-clock timings are left out so identical runs give identical files.
void write_run_bundle(const RunResult& result, const std::filesystem::path& dir, std::string_view config_text);

// ---------------------------------------------------------------------------
// Experiment

struct ExperimentData {
    EncodedDataset rows;  // chronological order
    FoldPlan folds;
};

/// Loads or synthesizes the configured dataset, encodes it and partitions it
/// into contiguous folds. Throws DataError for unreadable or too-small data.
ExperimentData load_experiment_data(const RunConfig& config);

/// Outcome of one (fold, algorithm, replicate) cell.
struct CellSummary {
    std::size_t fold = 0;  // 0-based
    Algorithm algorithm = Algorithm::Moead;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    double fitness_rmse = 0.0;
    double validation_rmse = 0.0;
    double test_rmse = 0.0;
    std::size_t size = 0;
    std::string model;
    std::vector<Point2> front;  // fitness-set objectives of the final archive
};

struct AlgorithmFold {
    Algorithm algorithm = Algorithm::Moead;
    std::vector<CellSummary> replicates;  // by replicate index
    std::size_t median = 0;               // lower median by (test_rmse, replicate)

    const CellSummary& median_cell() const { return replicates[median]; }
};

struct FoldReport {
    std::size_t fold = 0;  // 0-based
    std::size_t test_rows = 0;
    std::size_t fitness_rows = 0;
    std::size_t validation_rows = 0;
    std::vector<AlgorithmFold> algorithms;  // in configured order

    /// Throws std::out_of_range if the algorithm did not run.
    const AlgorithmFold& at(Algorithm algorithm) const;
};

/// Index of the lower median of `values`, ties broken by position.
std::size_t lower_median_index(std::span<const double> values);

/// One row of the front comparison table for fronts N and M.
struct ComparisonRow {
    double c_nm = 0.0;  // C(N, M): share of N dominated by M
    double c_mn = 0.0;  // C(M, N)
    std::optional<double> delta_n;  // absent for fronts of fewer than two points
    std::optional<double> delta_m;
    double nds_n = 0.0;
    double nds_m = 0.0;
};

struct ComparisonTable {
    std::vector<ComparisonRow> folds;
    ComparisonRow mean;  // column-wise over the folds; Delta over the folds where it exists
    ComparisonRow std;   // population standard deviation, same convention
};

/// Per-fold comparison of two algorithms' fronts. Throws
/// std::invalid_argument when the fold counts differ or a front is empty.
ComparisonTable compare_fronts(std::span<const FrontSnapshot> n_fronts, std::span<const FrontSnapshot> m_fronts);

struct ExperimentReport {
    std::vector<FoldReport> folds;
    /// Per algorithm, stats of the per-fold median test RMSE.
    std::vector<std::pair<Algorithm, RmseStats>> aggregate;
    /// NSGA-II (N) against MOEA/D (M); present when both ran.
    std::optional<ComparisonTable> table1;
};

struct ExperimentOptions {
    std::size_t jobs = 1;
    /// When set, every cell writes its bundle under
    /// `<output>/folds/<f>/<algo>/<r>/` as soon as it finishes.
    std::optional<std::filesystem::path> output;
    /// Reuse cells whose bundle was written by an identical configuration.
    bool resume = false;
    std::function<void(std::string_view)> log;
};

/// Runs every (fold, algorithm, replicate) cell. Fold f trains on the other
/// folds split with seed base_seed + f; replicate r of fold f uses seed
/// base_seed + f * replicates + r for every algorithm. The report does not
/// depend on `jobs` or on which cells were resumed.
ExperimentReport run_experiment(const RunConfig& config, const ExperimentOptions& options = {});

/// Writes config.txt, per_fold_rmse.csv, aggregate.json and, when present,
/// table1.csv into `dir`.
void write_experiment_report(const ExperimentReport& report, const RunConfig& config,
                             const std::filesystem::path& dir);

}  // namespace tecgp
