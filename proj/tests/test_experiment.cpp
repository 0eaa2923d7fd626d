#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "tecgp/errors.hpp"
#include "tecgp/experiment.hpp"

using namespace tecgp;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_config() {
    auto c = RunConfig::parse(
        "synth.max_records = 200\n"
        "synth.first_year = 2000\n"
        "synth.last_year = 2001\n"
        "experiment.folds = 2\n"
        "experiment.replicates = 1\n"
        "search.population = 12\n"
        "search.generations = 3\n");
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "tecgp_test_experiment" / name;
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("lower median") {
    CHECK(lower_median_index(std::vector<double>{5}) == 0);
    CHECK(lower_median_index(std::vector<double>{3, 1, 2}) == 2);
    CHECK(lower_median_index(std::vector<double>{4, 1, 3, 2}) == 3);
    CHECK(lower_median_index(std::vector<double>{2, 2, 2, 2}) == 1);
    CHECK_THROWS(lower_median_index(std::vector<double>{}));
}

TEST_CASE("front comparison") {
    const std::vector<FrontSnapshot> better = {FrontSnapshot({{1, 2}, {2, 1}}), FrontSnapshot({{0, 3}})};
    const std::vector<FrontSnapshot> worse = {FrontSnapshot({{2, 3}, {3, 2}}), FrontSnapshot({{1, 4}})};
    const auto t = compare_fronts(worse, better);  // N = worse, M = better
    for (const auto& row : t.folds) {
        CHECK(row.c_nm == 1.0);
        CHECK(row.c_mn == 0.0);
    }
    CHECK_FALSE(t.folds[1].delta_n.has_value());
    CHECK(t.mean.nds_n == 1.5);
    CHECK(t.std.nds_n == 0.5);
    CHECK(t.mean.delta_n.has_value());

    const auto same = compare_fronts(better, better);
    for (const auto& row : same.folds) {
        CHECK(row.c_nm == 0.0);
        CHECK(row.c_mn == 0.0);
        CHECK(row.nds_n == row.nds_m);
    }
    CHECK_THROWS_AS(compare_fronts(better, std::span<const FrontSnapshot>(worse).first(1)), std::invalid_argument);
}

TEST_CASE("bookkeeping on a tiny experiment") {
    const auto c = tiny_config();
    const auto report = run_experiment(c);
    REQUIRE(report.folds.size() == 2);
    for (const auto& f : report.folds) {
        CHECK(f.test_rows == 100);
        CHECK(f.fitness_rows == 67);
        CHECK(f.validation_rows == 33);
        CHECK(f.algorithms.size() == 3);
        for (const auto& a : f.algorithms) CHECK(a.replicates.size() == 1);
    }
    CHECK(report.aggregate.size() == 3);
    CHECK(report.table1.has_value());
    CHECK(report.folds[1].at(Algorithm::Moead).replicates[0].seed == 2);
}

TEST_CASE("errors surface before any run") {
    auto c = tiny_config();
    c.set("experiment.folds", "500");
    CHECK_THROWS_AS(run_experiment(c), DataError);
    c = tiny_config();
    c.set("moead.search.population", "1");
    CHECK_THROWS_AS(run_experiment(c), ConfigError);
}

TEST_CASE("reports are byte-identical across reruns and job counts") {
    auto c = tiny_config();
    c.set("experiment.replicates", "2");
    const auto a = fresh_dir("a");
    const auto b = fresh_dir("b");
    ExperimentOptions oa;
    oa.output = a;
    ExperimentOptions ob;
    ob.output = b;
    ob.jobs = 3;
    write_experiment_report(run_experiment(c, oa), c, a);
    write_experiment_report(run_experiment(c, ob), c, b);
    std::size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        ++files;
        const auto rel = fs::relative(entry.path(), a);
        REQUIRE(fs::exists(b / rel));
        CHECK(slurp(entry.path()) == slurp(b / rel));
    }
    CHECK(files == 3 + 1 + 2 * 3 * 2 * 5);  // report files + table + cells
    CHECK(fs::exists(a / "folds" / "2" / "moead" / "2" / "cell.json"));
    CHECK(slurp(a / "aggregate.json").find("tecgp 1.0.0") != std::string::npos);
}

TEST_CASE("table is omitted for a single algorithm") {
    auto c = tiny_config();
    c.set("experiment.algorithms", "moead");
    const auto dir = fresh_dir("single");
    const auto report = run_experiment(c);
    CHECK_FALSE(report.table1.has_value());
    write_experiment_report(report, c, dir);
    CHECK_FALSE(fs::exists(dir / "table1.csv"));
    CHECK(fs::exists(dir / "per_fold_rmse.csv"));
}

TEST_CASE("resume reuses completed cells") {
    auto c = tiny_config();
    const auto dir = fresh_dir("resume");
    ExperimentOptions o;
    o.output = dir;
    const auto first = run_experiment(c, o);
    write_experiment_report(first, c, dir);
    const auto marker = dir / "folds" / "1" / "sgp" / "1" / "cell.json";
    const auto stamp = fs::last_write_time(marker);
    const auto table = slurp(dir / "table1.csv");

    // a removed cell is recomputed; the others are left untouched
    fs::remove_all(dir / "folds" / "2" / "nsga2");
    o.resume = true;
    const auto second = run_experiment(c, o);
    write_experiment_report(second, c, dir);
    CHECK(fs::last_write_time(marker) == stamp);
    CHECK(fs::exists(dir / "folds" / "2" / "nsga2" / "1" / "cell.json"));
    CHECK(slurp(dir / "table1.csv") == table);

    // a different configuration invalidates the cells
    c.set("search.generations", "2");
    (void)run_experiment(c, o);
    CHECK(fs::last_write_time(marker) != stamp);
}

TEST_CASE("aggregates recompute from the per-replicate file") {
    auto c = tiny_config();
    c.set("experiment.replicates", "3");
    const auto dir = fresh_dir("aggregate");
    const auto report = run_experiment(c);
    write_experiment_report(report, c, dir);
    std::ifstream in(dir / "per_fold_rmse.csv");
    std::string line;
    std::getline(in, line);
    std::map<std::string, std::vector<double>> medians;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
        if (f[8] == "1") medians[f[1]].push_back(std::stod(f[6]));
    }
    for (const auto& [algo, stats] : report.aggregate) {
        const auto s = rmse_stats(medians[std::string(algorithm_name(algo))]);
        CHECK(s.mean == stats.mean);
        CHECK(s.std == stats.std);
        CHECK(s.min == stats.min);
    }
}

TEST_CASE("recoverable target through the harness") {
    // encoded data whose target is exactly sinhour * coshour
    SynthConfig sc;
    sc.max_records = 400;
    Rng rng(3);
    auto rows = encode_records(synth_vtec(sc, rng), SunspotModel{});
    for (auto& r : rows) r.target_vtec = r.sinhour * r.coshour;
    const auto dir = fresh_dir("recover");
    fs::create_directories(dir);
    write_encoded_csv(rows, dir / "enc.csv");
    auto c = RunConfig::parse("data.source = encoded_csv\nexperiment.folds = 4\nexperiment.replicates = 1\n"
                              "experiment.algorithms = moead\nsearch.population = 100\n");
    c.data.encoded_csv = dir / "enc.csv";
    const auto report = run_experiment(c);
    for (const auto& f : report.folds) CHECK(f.at(Algorithm::Moead).median_cell().test_rmse < 1e-6);
}

}
