#include "tecgp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "tecgp/errors.hpp"

namespace tecgp {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << text;
    if (!out.flush()) {
        throw DataError("write failed for " + path.string());
    }
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string config_file_text(std::string_view config_text) {
    std::string out = "# ";
    out += kToolVersion;
    out += '\n';
    out += config_text;
    return out;
}

}  // namespace

void write_run_bundle(const RunResult& result, const fs::path& dir, std::string_view config_text) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
    }

    std::string archive = "rmse_fitness,size,rmse_validation,prefix_expression\n";
    for (const auto& member : result.archive.members()) {
        archive += format_double(member.fitness.rmse);
        archive += ',';
        archive += std::to_string(member.fitness.size);
        archive += ',';
        archive += member.validation ? format_double(member.validation->rmse) : std::string("nan");
        archive += ',';
        archive += to_prefix(member.tree);
        archive += '\n';
    }
    write_text(dir / "archive.csv", archive);

    write_text(dir / "model.txt", to_prefix(result.best_model().tree) + "\n");

    std::string trace = "generation,best_fitness_rmse,archive_size,evaluations\n";
    for (const auto& g : result.trace) {
        trace += std::to_string(g.generation) + ',' + format_double(g.best_fitness_rmse) + ',' +
                 std::to_string(g.archive_size) + ',' + std::to_string(g.evaluations) + '\n';
    }
    write_text(dir / "trace.csv", trace);

    write_text(dir / "config.txt", config_file_text(config_text));
}

// ---------------------------------------------------------------------------
// Data

ExperimentData load_experiment_data(const RunConfig& config) {
    ExperimentData data;
    const std::size_t k = config.experiment.folds;
    switch (config.data.kind) {
        case DataSourceKind::Synthetic: {
            Rng record_rng(config.experiment.base_seed, 1);
            Rng sunspot_rng(config.experiment.base_seed, 2);
            const auto records = synth_vtec(config.synth, record_rng);
            const auto sunspots = synth_sunspots(config.synth, sunspot_rng);
            const auto model = fit_sunspot(sunspots, config.data.sunspot_components);
            data.folds = build_folds(records, k);
            data.rows = EncodedDataset(encode_records(records, model));
            break;
        }
        case DataSourceKind::RawCsv: {
            const auto records = load_raw_csv(config.data.raw_csv);
            const auto sunspots = load_sunspot_csv(config.data.sunspot_csv);
            const auto model = fit_sunspot(sunspots, config.data.sunspot_components);
            data.folds = build_folds(records, k);
            data.rows = EncodedDataset(encode_records(records, model));
            break;
        }
        case DataSourceKind::EncodedCsv: {
            const auto rows = load_encoded_csv(config.data.encoded_csv);
            data.folds = build_folds(rows.size(), k);
            data.rows = EncodedDataset(rows);
            break;
        }
    }
    return data;
}

// ---------------------------------------------------------------------------
// Reports

const AlgorithmFold& FoldReport::at(Algorithm algorithm) const {
    for (const auto& a : algorithms) {
        if (a.algorithm == algorithm) return a;
    }
    throw std::out_of_range("fold " + std::to_string(fold + 1) + " has no results for " +
                            std::string(algorithm_name(algorithm)));
}

std::size_t lower_median_index(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("lower_median_index: empty list");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(values[a], a) < std::tie(values[b], b);
    });
    return order[(order.size() - 1) / 2];
}

namespace {

std::optional<double> optional_delta(const FrontSnapshot& front) {
    if (front.size() < 2) return std::nullopt;
    return delta_metric(front);
}

/// Column-wise mean and std; absent Delta cells are skipped.
std::pair<ComparisonRow, ComparisonRow> summarize(const std::vector<ComparisonRow>& rows) {
    ComparisonRow mean;
    ComparisonRow sd;
    auto column = [&](auto get, double& mean_out, double& sd_out) {
        std::vector<double> values;
        for (const auto& r : rows) values.push_back(get(r));
        const auto s = rmse_stats(values);
        mean_out = s.mean;
        sd_out = s.std;
    };
    auto optional_column = [&](auto get, std::optional<double>& mean_out, std::optional<double>& sd_out) {
        std::vector<double> values;
        for (const auto& r : rows) {
            if (const auto v = get(r)) values.push_back(*v);
        }
        if (values.empty()) return;
        const auto s = rmse_stats(values);
        mean_out = s.mean;
        sd_out = s.std;
    };
    column([](const ComparisonRow& r) { return r.c_nm; }, mean.c_nm, sd.c_nm);
    column([](const ComparisonRow& r) { return r.c_mn; }, mean.c_mn, sd.c_mn);
    optional_column([](const ComparisonRow& r) { return r.delta_n; }, mean.delta_n, sd.delta_n);
    optional_column([](const ComparisonRow& r) { return r.delta_m; }, mean.delta_m, sd.delta_m);
    column([](const ComparisonRow& r) { return r.nds_n; }, mean.nds_n, sd.nds_n);
    column([](const ComparisonRow& r) { return r.nds_m; }, mean.nds_m, sd.nds_m);
    return {mean, sd};
}

}  // namespace

ComparisonTable compare_fronts(std::span<const FrontSnapshot> n_fronts, std::span<const FrontSnapshot> m_fronts) {
    if (n_fronts.size() != m_fronts.size()) {
        throw std::invalid_argument("compare_fronts: " + std::to_string(n_fronts.size()) + " folds against " +
                                    std::to_string(m_fronts.size()));
    }
    if (n_fronts.empty()) {
        throw std::invalid_argument("compare_fronts: no folds");
    }
    ComparisonTable table;
    for (std::size_t f = 0; f < n_fronts.size(); ++f) {
        const auto& n = n_fronts[f];
        const auto& m = m_fronts[f];
        if (n.size() == 0 || m.size() == 0) {
            throw std::invalid_argument("compare_fronts: empty front in fold " + std::to_string(f + 1));
        }
        ComparisonRow row;
        row.c_nm = c_metric(n, m);
        row.c_mn = c_metric(m, n);
        row.delta_n = optional_delta(n);
        row.delta_m = optional_delta(m);
        row.nds_n = static_cast<double>(nds(n));
        row.nds_m = static_cast<double>(nds(m));
        table.folds.push_back(row);
    }
    std::tie(table.mean, table.std) = summarize(table.folds);
    return table;
}

// ---------------------------------------------------------------------------
// Experiment driver

namespace {

struct FoldData {
    EncodedDataset fitness;
    EncodedDataset validation;
    EncodedDataset test;
};

struct Cell {
    std::size_t fold;
    Algorithm algorithm;
    std::size_t replicate;
    std::uint64_t seed;
};

fs::path cell_dir(const fs::path& root, const Cell& cell) {
    return root / "folds" / std::to_string(cell.fold + 1) / std::string(algorithm_name(cell.algorithm)) /
           std::to_string(cell.replicate + 1);
}

/// Everything that determines a cell's outcome, as text.
std::string cell_identity(const std::string& resolved, const Cell& cell) {
    std::string out;
    std::istringstream lines(resolved);
    for (std::string line; std::getline(lines, line);) {
        // the algorithm list decides which cells exist, not what they compute
        if (line.rfind("experiment.algorithms", 0) == 0) continue;
        out += line;
        out += '\n';
    }
    out += "cell.fold = " + std::to_string(cell.fold + 1) + '\n';
    out += "cell.algorithm = " + std::string(algorithm_name(cell.algorithm)) + '\n';
    out += "cell.replicate = " + std::to_string(cell.replicate + 1) + '\n';
    out += "cell.seed = " + std::to_string(cell.seed) + '\n';
    return out;
}

ordered_json cell_to_json(const CellSummary& s, const std::string& digest) {
    ordered_json j;
    j["digest"] = digest;
    j["fold"] = s.fold + 1;
    j["algorithm"] = std::string(algorithm_name(s.algorithm));
    j["replicate"] = s.replicate + 1;
    j["seed"] = s.seed;
    j["fitness_rmse"] = s.fitness_rmse;
    j["validation_rmse"] = s.validation_rmse;
    j["test_rmse"] = s.test_rmse;
    j["size"] = s.size;
    j["model"] = s.model;
    ordered_json front = ordered_json::array();
    for (const auto& p : s.front) front.push_back({p[0], p[1]});
    j["front"] = front;
    return j;
}

std::optional<CellSummary> load_cell(const fs::path& path, const Cell& cell, const std::string& digest) {
    if (!fs::exists(path)) return std::nullopt;
    try {
        const auto j = nlohmann::json::parse(read_text(path));
        if (j.at("digest").get<std::string>() != digest) return std::nullopt;
        CellSummary s;
        s.fold = cell.fold;
        s.algorithm = cell.algorithm;
        s.replicate = cell.replicate;
        s.seed = cell.seed;
        s.fitness_rmse = j.at("fitness_rmse").get<double>();
        s.validation_rmse = j.at("validation_rmse").get<double>();
        s.test_rmse = j.at("test_rmse").get<double>();
        s.size = j.at("size").get<std::size_t>();
        s.model = j.at("model").get<std::string>();
        for (const auto& p : j.at("front")) s.front.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        return s;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;  // damaged record: recompute the cell
    }
}

void check_leakage(const TrainingSplit& split, std::span<const std::size_t> test, std::span<const std::size_t> training) {
    std::vector<std::size_t> used;
    used.reserve(split.fitness.size() + split.validation.size());
    std::merge(split.fitness.begin(), split.fitness.end(), split.validation.begin(), split.validation.end(),
               std::back_inserter(used));
    if (!std::equal(used.begin(), used.end(), training.begin(), training.end())) {
        throw std::logic_error("fitness and validation sets do not partition the training folds");
    }
    std::vector<std::size_t> overlap;
    std::set_intersection(used.begin(), used.end(), test.begin(), test.end(), std::back_inserter(overlap));
    if (!overlap.empty()) {
        throw std::logic_error("test fold row " + std::to_string(overlap.front()) + " leaked into training");
    }
}

CellSummary run_cell(const Cell& cell, const RunConfig& config, const FoldData& fold,
                     const ExperimentOptions& options, const std::string& resolved) {
    const std::string identity = cell_identity(resolved, cell);
    const std::string digest = digest_hex(identity);
    std::optional<fs::path> dir;
    if (options.output) dir = cell_dir(*options.output, cell);

    if (dir && options.resume) {
        if (auto done = load_cell(*dir / "cell.json", cell, digest)) return *done;
    }

    Rng rng(cell.seed);
    const RunResult result =
        run_algorithm(cell.algorithm, config.search_for(cell.algorithm), fold.fitness, fold.validation, rng);
    const Individual& best = result.best_model();

    CellSummary s;
    s.fold = cell.fold;
    s.algorithm = cell.algorithm;
    s.replicate = cell.replicate;
    s.seed = cell.seed;
    s.fitness_rmse = best.fitness.rmse;
    s.validation_rmse = best.validation->rmse;
    s.test_rmse = rmse(best.tree, fold.test);
    s.size = best.tree.size();
    s.model = to_prefix(best.tree);
    s.front = result.archive.points();

    if (dir) {
        std::error_code ec;
        fs::remove(*dir / "cell.json", ec);
        write_run_bundle(result, *dir, identity);
        // written last: its presence marks the cell as complete
        write_text(*dir / "cell.json", cell_to_json(s, digest).dump(2) + "\n");
    }
    return s;
}

}  // namespace

ExperimentReport run_experiment(const RunConfig& config, const ExperimentOptions& options) {
    config.validate();
    if (options.jobs < 1) {
        throw ConfigError("jobs must be >= 1");
    }
    const ExperimentData data = load_experiment_data(config);
    const std::string resolved = config.resolved_text();
    const auto& settings = config.experiment;
    const std::size_t k = data.folds.fold_count();

    std::vector<FoldData> folds;
    folds.reserve(k);
    for (std::size_t f = 0; f < k; ++f) {
        const auto test = data.folds.test_indices(f);
        const auto training = data.folds.training_indices(f);
        Rng split_rng(settings.base_seed + f, 3);
        const TrainingSplit split = split_training(training, settings.fitness_fraction, split_rng);
        check_leakage(split, test, training);
        if (split.fitness.empty() || split.validation.empty()) {
            throw DataError("fold " + std::to_string(f + 1) + ": too few training rows to split");
        }
        folds.push_back({data.rows.subset(split.fitness), data.rows.subset(split.validation), data.rows.subset(test)});
    }

    std::vector<Cell> cells;
    for (std::size_t f = 0; f < k; ++f) {
        for (const auto algorithm : settings.algorithms) {
            for (std::size_t r = 0; r < settings.replicates; ++r) {
                cells.push_back({f, algorithm, r, settings.base_seed + f * settings.replicates + r});
            }
        }
    }

    std::vector<std::optional<CellSummary>> results(cells.size());
    std::vector<std::exception_ptr> errors(cells.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::atomic<std::size_t> finished{0};
    std::mutex log_mutex;

    auto worker = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& cell = cells[i];
            try {
                results[i] = run_cell(cell, config, folds[cell.fold], options, resolved);
            } catch (...) {
                errors[i] = std::current_exception();
                failed.store(true);
                return;
            }
            const std::size_t done = finished.fetch_add(1) + 1;
            if (options.log) {
                std::ostringstream line;
                line << "cell " << done << '/' << cells.size() << " fold=" << cell.fold + 1
                     << " algo=" << algorithm_name(cell.algorithm) << " replicate=" << cell.replicate + 1
                     << " test_rmse=" << format_double(results[i]->test_rmse);
                std::lock_guard lock(log_mutex);
                options.log(line.str());
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const std::size_t workers = std::min(options.jobs, cells.size());
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    ExperimentReport report;
    std::size_t i = 0;
    for (std::size_t f = 0; f < k; ++f) {
        FoldReport fold;
        fold.fold = f;
        fold.test_rows = folds[f].test.size();
        fold.fitness_rows = folds[f].fitness.size();
        fold.validation_rows = folds[f].validation.size();
        for (const auto algorithm : settings.algorithms) {
            AlgorithmFold af;
            af.algorithm = algorithm;
            std::vector<double> test_rmse;
            for (std::size_t r = 0; r < settings.replicates; ++r, ++i) {
                af.replicates.push_back(*results[i]);
                test_rmse.push_back(results[i]->test_rmse);
            }
            af.median = lower_median_index(test_rmse);
            fold.algorithms.push_back(std::move(af));
        }
        report.folds.push_back(std::move(fold));
    }

    for (const auto algorithm : settings.algorithms) {
        std::vector<double> medians;
        for (const auto& fold : report.folds) medians.push_back(fold.at(algorithm).median_cell().test_rmse);
        report.aggregate.emplace_back(algorithm, rmse_stats(medians));
    }

    const auto& algos = settings.algorithms;
    if (std::find(algos.begin(), algos.end(), Algorithm::Nsga2) != algos.end() &&
        std::find(algos.begin(), algos.end(), Algorithm::Moead) != algos.end()) {
        std::vector<FrontSnapshot> n_fronts;
        std::vector<FrontSnapshot> m_fronts;
        for (const auto& fold : report.folds) {
            n_fronts.emplace_back(fold.at(Algorithm::Nsga2).median_cell().front, "nsga2");
            m_fronts.emplace_back(fold.at(Algorithm::Moead).median_cell().front, "moead");
        }
        report.table1 = compare_fronts(n_fronts, m_fronts);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report files

namespace {

std::string cell_text(const std::optional<double>& v) { return v ? format_double(*v) : std::string("nan"); }

std::string row_text(const std::string& label, const ComparisonRow& r) {
    return label + ',' + format_double(r.c_nm) + ',' + format_double(r.c_mn) + ',' + cell_text(r.delta_n) + ',' +
           cell_text(r.delta_m) + ',' + format_double(r.nds_n) + ',' + format_double(r.nds_m) + '\n';
}

}  // namespace

void write_experiment_report(const ExperimentReport& report, const RunConfig& config, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
    }
    const std::string resolved = config.resolved_text();
    write_text(dir / "config.txt", config_file_text(resolved));

    std::string per_fold = "fold,algorithm,replicate,seed,fitness_rmse,validation_rmse,test_rmse,size,is_median\n";
    for (const auto& fold : report.folds) {
        for (const auto& af : fold.algorithms) {
            for (std::size_t r = 0; r < af.replicates.size(); ++r) {
                const auto& c = af.replicates[r];
                per_fold += std::to_string(fold.fold + 1) + ',' + std::string(algorithm_name(af.algorithm)) + ',' +
                            std::to_string(r + 1) + ',' + std::to_string(c.seed) + ',' +
                            format_double(c.fitness_rmse) + ',' + format_double(c.validation_rmse) + ',' +
                            format_double(c.test_rmse) + ',' + std::to_string(c.size) + ',' +
                            (r == af.median ? "1" : "0") + '\n';
            }
        }
    }
    write_text(dir / "per_fold_rmse.csv", per_fold);

    const fs::path table_path = dir / "table1.csv";
    if (report.table1) {
        std::string table = "fold,C(N,M),C(M,N),Delta(N),Delta(M),NDS(N),NDS(M)\n";
        for (std::size_t f = 0; f < report.table1->folds.size(); ++f) {
            table += row_text(std::to_string(f + 1), report.table1->folds[f]);
        }
        table += row_text("mean", report.table1->mean);
        table += row_text("std", report.table1->std);
        write_text(table_path, table);
    } else {
        fs::remove(table_path, ec);
    }

    ordered_json j;
    j["tool_version"] = std::string(kToolVersion);
    j["config_digest"] = digest_hex(resolved);
    j["config"] = resolved;
    j["folds"] = report.folds.size();
    j["replicates"] = config.experiment.replicates;
    ordered_json algorithms = ordered_json::object();
    for (const auto& [algorithm, stats] : report.aggregate) {
        ordered_json a;
        a["min"] = stats.min;
        a["max"] = stats.max;
        a["mean"] = stats.mean;
        a["std"] = stats.std;
        ordered_json medians = ordered_json::array();
        for (const auto& fold : report.folds) medians.push_back(fold.at(algorithm).median_cell().test_rmse);
        a["fold_median_test_rmse"] = medians;
        algorithms[std::string(algorithm_name(algorithm))] = a;
    }
    j["test_rmse"] = algorithms;
    write_text(dir / "aggregate.json", j.dump(2) + "\n");
}

}  // namespace tecgp
