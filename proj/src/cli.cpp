#include "tecgp/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "tecgp/config.hpp"
#include "tecgp/errors.hpp"
#include "tecgp/experiment.hpp"
#include "tecgp/metrics.hpp"

namespace tecgp {

namespace fs = std::filesystem;

namespace {

std::string one_line(std::string text) {
    for (char& c : text) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return text;
}

RunConfig base_config(const std::string& path, const RunConfig& defaults) {
    return path.empty() ? defaults : RunConfig::load(path, defaults);
}

std::string read_model(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot read model file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Front points from a bundle's archive.csv (first two columns).
FrontSnapshot read_front(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind("rmse_fitness,size,", 0) != 0) {
        throw DataError(path.string() + ":1: expected an archive.csv header");
    }
    std::vector<Point2> points;
    for (std::size_t number = 2; std::getline(in, line); ++number) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string rmse_text;
        std::string size_text;
        std::getline(fields, rmse_text, ',');
        std::getline(fields, size_text, ',');
        try {
            std::size_t used = 0;
            const double r = std::stod(rmse_text, &used);
            if (used != rmse_text.size()) throw std::invalid_argument(rmse_text);
            const double s = std::stod(size_text, &used);
            if (used != size_text.size()) throw std::invalid_argument(size_text);
            points.push_back({r, s});
        } catch (const std::exception&) {
            throw DataError(path.string() + ":" + std::to_string(number) + ": malformed archive row");
        }
    }
    return FrontSnapshot(std::move(points), path.string());
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-objective symbolic regression for vTEC modelling", "tecgp"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "Write a synthetic hourly vTEC dataset");
    std::string gen_config;
    std::string gen_years;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    std::string gen_sunspot_out;
    std::optional<double> gen_noise;
    std::optional<std::size_t> gen_max_records;
    gen->add_option("--config", gen_config, "Config file (synth.* keys)");
    gen->add_option("--years", gen_years, "Year range FIRST:LAST");
    gen->add_option("--seed", gen_seed, "Random seed");
    gen->add_option("--noise", gen_noise, "Gaussian noise standard deviation (TECU)");
    gen->add_option("--max-records", gen_max_records, "Keep a random subset of this many rows (0 keeps all)");
    gen->add_option("-o,--output", gen_out, "Raw CSV to write")->required();
    gen->add_option("--sunspot-out", gen_sunspot_out, "Also write the monthly sunspot series");

    // encode
    auto* enc = app.add_subcommand("encode", "Encode raw records into model inputs");
    std::string enc_raw;
    std::string enc_sunspot;
    std::size_t enc_components = 2;
    std::string enc_out;
    enc->add_option("--raw", enc_raw, "Raw CSV (year,daynum,hour,vtec)")->required();
    enc->add_option("--sunspot", enc_sunspot, "Monthly sunspot CSV (year,month,mean_ssn)")->required();
    enc->add_option("--components", enc_components, "Sinusoids in the sunspot curve");
    enc->add_option("-o,--output", enc_out, "Encoded CSV to write")->required();

    // train
    auto* train = app.add_subcommand("train", "Run one optimizer and write its bundle");
    std::string train_algo;
    std::string train_config;
    std::uint64_t train_seed = 1;
    std::string train_fitness;
    std::string train_validation;
    std::string train_out;
    std::optional<std::size_t> train_gen_max;
    std::optional<std::size_t> train_population;
    std::optional<std::size_t> train_threads;
    train->add_option("--algo", train_algo, "sgp, nsga2 or moead")->required();
    train->add_option("--config", train_config, "Config file");
    train->add_option("--seed", train_seed, "Random seed");
    train->add_option("--fitness-csv", train_fitness, "Encoded fitness-evaluation set")->required();
    train->add_option("--validation-csv", train_validation, "Encoded validation set")->required();
    train->add_option("-o,--output", train_out, "Bundle directory")->required();
    train->add_option("--gen-max", train_gen_max, "Generations");
    train->add_option("--population", train_population, "Population size");
    train->add_option("--threads", train_threads, "Fitness evaluation threads");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run the cross-validation experiment");
    std::string exp_config;
    std::string exp_out;
    std::size_t exp_jobs = 1;
    std::string exp_algos;
    bool exp_resume = false;
    exp->add_option("--config", exp_config, "Config file");
    exp->add_option("-o,--output", exp_out, "Report directory")->required();
    exp->add_option("--jobs", exp_jobs, "Cells run in parallel");
    exp->add_option("--algos", exp_algos, "Comma-separated algorithm list");
    exp->add_flag("--resume", exp_resume, "Reuse completed cells");

    // predict
    auto* pred = app.add_subcommand("predict", "Evaluate a model on encoded rows");
    std::string pred_model;
    std::string pred_input;
    std::string pred_out;
    pred->add_option("--model", pred_model, "File holding a prefix-notation model")->required();
    pred->add_option("--input", pred_input, "Encoded CSV")->required();
    pred->add_option("-o,--output", pred_out, "Predictions CSV (stdout if omitted)");

    // metrics
    auto* met = app.add_subcommand("metrics", "Compare two archive.csv fronts");
    std::string met_a;
    std::string met_b;
    met->add_option("--front-a", met_a, "First archive.csv")->required();
    met->add_option("--front-b", met_b, "Second archive.csv")->required();

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return kExitOk;
        } catch (const CLI::CallForVersion&) {
            out << kToolVersion << '\n';
            return kExitOk;
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) {
                out << app.help();
                return kExitOk;
            }
            err << "error: usage: " << one_line(e.what()) << '\n';
            return kExitUsage;
        }

        if (*gen) {
            RunConfig config = base_config(gen_config, RunConfig{});
            if (!gen_years.empty()) {
                const auto colon = gen_years.find(':');
                if (colon == std::string::npos) {
                    throw ConfigError("--years expects FIRST:LAST, got '" + gen_years + "'");
                }
                config.set("synth.first_year", gen_years.substr(0, colon));
                config.set("synth.last_year", gen_years.substr(colon + 1));
            }
            if (gen_noise) config.set("synth.noise", format_double(*gen_noise));
            if (gen_max_records) config.set("synth.max_records", std::to_string(*gen_max_records));
            config.set("experiment.base_seed", std::to_string(gen_seed));
            config.synth.validate();

            Rng record_rng(gen_seed, 1);
            const auto records = synth_vtec(config.synth, record_rng);
            write_raw_csv(records, gen_out);
            if (!gen_sunspot_out.empty()) {
                Rng sunspot_rng(gen_seed, 2);
                write_sunspot_csv(synth_sunspots(config.synth, sunspot_rng), gen_sunspot_out);
            }
            out << "rows=" << records.size() << " config_digest=" << digest_hex(config.resolved_text()) << '\n';
        } else if (*enc) {
            if (enc_components < 1) throw ConfigError("--components must be >= 1");
            const auto records = load_raw_csv(enc_raw);
            const auto model = fit_sunspot(load_sunspot_csv(enc_sunspot), enc_components);
            const auto rows = encode_records(records, model);
            write_encoded_csv(rows, enc_out);
            out << "rows=" << rows.size() << " sunspot_fit_rmse=" << format_double(model.residual_rmse) << '\n';
        } else if (*train) {
            const Algorithm algorithm = parse_algorithm(train_algo);
            RunConfig config = base_config(train_config, RunConfig::desk_scale());
            if (train_gen_max) config.set("search.generations", std::to_string(*train_gen_max));
            if (train_population) config.set("search.population", std::to_string(*train_population));
            if (train_threads) config.set("search.threads", std::to_string(*train_threads));
            const SearchConfig search = config.search_for(algorithm);
            search.validate();

            const EncodedDataset fitness(load_encoded_csv(train_fitness));
            const EncodedDataset validation(load_encoded_csv(train_validation));
            Rng rng(train_seed);
            const RunResult result = run_algorithm(algorithm, search, fitness, validation, rng);

            // threads do not change results, so they stay out of the bundle
            std::string text = config.resolved_text();
            std::string filtered;
            std::istringstream lines(text);
            for (std::string line; std::getline(lines, line);) {
                if (line.find("search.threads") == std::string::npos) filtered += line + '\n';
            }
            filtered += "train.algorithm = " + std::string(algorithm_name(algorithm)) + '\n';
            filtered += "train.seed = " + std::to_string(train_seed) + '\n';
            filtered += "train.fitness_csv = " + train_fitness + '\n';
            filtered += "train.validation_csv = " + train_validation + '\n';
            write_run_bundle(result, train_out, filtered);

            const Individual& best = result.best_model();
            out << "best validation_rmse=" << format_double(best.validation->rmse)
                << " fitness_rmse=" << format_double(best.fitness.rmse) << " size=" << best.tree.size()
                << " archive=" << result.archive.size() << " model=" << to_prefix(best.tree) << '\n';
        } else if (*exp) {
            RunConfig config = base_config(exp_config, RunConfig::desk_scale());
            if (!exp_algos.empty()) config.set("experiment.algorithms", exp_algos);
            ExperimentOptions options;
            options.jobs = exp_jobs;
            options.output = fs::path(exp_out);
            options.resume = exp_resume;
            options.log = [&err](std::string_view line) { err << line << '\n'; };
            const ExperimentReport report = run_experiment(config, options);
            write_experiment_report(report, config, exp_out);
            for (const auto& [algorithm, stats] : report.aggregate) {
                out << algorithm_name(algorithm) << " median_test_rmse mean=" << format_double(stats.mean)
                    << " std=" << format_double(stats.std) << " min=" << format_double(stats.min)
                    << " max=" << format_double(stats.max) << '\n';
            }
        } else if (*pred) {
            const std::string text = read_model(pred_model);
            const ExprTree model = parse_prefix(text);
            const EncodedDataset data(load_encoded_csv(pred_input));
            std::vector<double> predictions(data.size());
            model.evaluate(data.columns(), predictions);
            std::ostringstream csv;
            csv << "prediction\n";
            for (const double p : predictions) csv << format_double(p) << '\n';
            if (pred_out.empty()) {
                out << csv.str();
            } else {
                std::ofstream file(pred_out, std::ios::binary | std::ios::trunc);
                if (!(file << csv.str())) throw DataError("cannot write " + pred_out);
                out << "rows=" << predictions.size() << " rmse=" << format_double(rmse(predictions, data.targets()))
                    << '\n';
            }
        } else if (*met) {
            const FrontSnapshot a = read_front(met_a);
            const FrontSnapshot b = read_front(met_b);
            if (a.size() == 0 || b.size() == 0) throw DataError("metrics: empty front");
            auto delta = [](const FrontSnapshot& f) {
                return f.size() < 2 ? std::string("nan") : format_double(delta_metric(f));
            };
            out << "C(A,B)=" << format_double(c_metric(a, b)) << " C(B,A)=" << format_double(c_metric(b, a))
                << " Delta(A)=" << delta(a) << " Delta(B)=" << delta(b) << " NDS(A)=" << nds(a)
                << " NDS(B)=" << nds(b) << '\n';
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: config: " << one_line(e.what()) << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: data: " << one_line(e.what()) << '\n';
        return kExitData;
    } catch (const ParseError& e) {
        err << "error: data: model parse error at position " << e.position() << ": " << one_line(e.what()) << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: internal: " << one_line(e.what()) << '\n';
        return kExitInternal;
    }
}

}  // namespace tecgp
