#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "tecgp/config.hpp"
#include "tecgp/errors.hpp"

using namespace tecgp;

TEST_SUITE("config") {

TEST_CASE("defaults") {
    const auto c = RunConfig::desk_scale();
    CHECK(c.synth.max_records == 5000);
    CHECK(c.synth.noise == 2.0);
    CHECK(c.search.population == 200);
    CHECK(c.search.generations == 50);
    CHECK(c.experiment.folds == 10);
    CHECK(c.experiment.replicates == 5);
    CHECK(c.experiment.algorithms.size() == 3);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("parsing") {
    const auto c = RunConfig::parse(
        "# comment\n"
        "search.population = 60   # trailing comment\n"
        "\n"
        "experiment.algorithms = moead, nsga2\n"
        "moead.search.generations = 7\n"
        "operators.constants = true\n"
        "synth.noise = 0.5\n");
    CHECK(c.search.population == 60);
    CHECK(c.experiment.algorithms == std::vector<Algorithm>{Algorithm::Moead, Algorithm::Nsga2});
    CHECK(c.search_for(Algorithm::Moead).generations == 7);
    CHECK(c.search_for(Algorithm::Nsga2).generations == 50);
    CHECK(c.search_for(Algorithm::Moead).population == 60);
    CHECK(c.search.operators.primitives.use_constants);
    CHECK(c.synth.noise == 0.5);
}

TEST_CASE("strict rejection") {
    CHECK_THROWS_AS(RunConfig::parse("search.populaton = 5\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("search.population = 5\nsearch.population = 6\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("search.population 5\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("search.population = five\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("search.population = 5.5\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("synth.noise = nan\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("operators.constants = yes\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("data.source = ftp\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("experiment.algorithms = moead,moead\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("gp.search.population = 5\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("moead.synth.noise = 5\n"), ConfigError);
    try {
        (void)RunConfig::parse("\n\nbogus = 1\n");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(RunConfig::parse("experiment.folds = 1\n").validate(), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("experiment.replicates = 0\n").validate(), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("experiment.fitness_fraction = 1\n").validate(), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("nsga2.search.population = 1\n").validate(), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("data.source = raw_csv\n").validate(), ConfigError);
}

TEST_CASE("resolved text is a fixed point and reflects overrides") {
    const auto c = RunConfig::parse("moead.search.population = 30\nsynth.noise = 0.25\n");
    const auto text = c.resolved_text();
    CHECK(text.find("moead.search.population = 30\n") != std::string::npos);
    CHECK(text.find("synth.noise = 0.25\n") != std::string::npos);
    const auto again = RunConfig::parse(text);
    CHECK(again.resolved_text() == text);
    CHECK(digest_hex(text) == digest_hex(again.resolved_text()));
    CHECK(digest_hex(text).size() == 16);
    CHECK(digest_hex("") == "cbf29ce484222325");
    CHECK(digest_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("loading from a file") {
    const auto path = std::filesystem::temp_directory_path() / "tecgp_test_config.txt";
    {
        std::ofstream out(path);
        out << "search.generations = 3\nbad key = 1\n";
    }
    try {
        (void)RunConfig::load(path);
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find(path.string()) != std::string::npos);
    }
    {
        std::ofstream out(path);
        out << "search.generations = 3\n";
    }
    CHECK(RunConfig::load(path).search.generations == 3);
    CHECK_THROWS_AS(RunConfig::load(path.string() + ".missing"), ConfigError);
}

}
