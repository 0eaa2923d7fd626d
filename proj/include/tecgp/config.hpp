#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tecgp/dataio.hpp"
#include "tecgp/optimizers.hpp"

namespace tecgp {

inline constexpr std::string_view kToolVersion = "tecgp 1.0.0";

enum class DataSourceKind { Synthetic, RawCsv, EncodedCsv };

struct DataSourceConfig {
    DataSourceKind kind = DataSourceKind::Synthetic;
    std::filesystem::path raw_csv;
    std::filesystem::path sunspot_csv;
    std::filesystem::path encoded_csv;
    std::size_t sunspot_components = 2;
};

struct ExperimentSettings {
    std::vector<Algorithm> algorithms = {Algorithm::Sgp, Algorithm::Nsga2, Algorithm::Moead};
    std::size_t folds = 10;
    std::size_t replicates = 5;
    std::uint64_t base_seed = 1;
    double fitness_fraction = 0.67;
};

/// Declarative run configuration.
///
/// File syntax: one `key = value` per line; `#` starts a comment; blank lines
/// are ignored. Unknown or repeated keys are errors. Search and operator keys
/// may carry an algorithm prefix (`moead.search.population = 100`) to
/// override the shared value for that algorithm only. Every key and its
/// default is listed by resolved_text() on a default-constructed config.
struct RunConfig {
    DataSourceConfig data;
    SynthConfig synth;
    ExperimentSettings experiment;
    SearchConfig search;
    /// algorithm -> (search/operator key -> raw value)
    std::map<Algorithm, std::map<std::string, std::string>> overrides;

    /// Desk-scale experiment profile: 5,000 synthetic rows, m = 200,
    /// 50 generations, 10 folds, 5 replicates.
    static RunConfig desk_scale();

    static RunConfig parse(std::string_view text, const RunConfig& defaults = desk_scale());
    static RunConfig load(const std::filesystem::path& path, const RunConfig& defaults = desk_scale());

    /// Applies one `key = value` assignment. Throws ConfigError on unknown keys
    /// or unparseable values.
    void set(std::string_view key, std::string_view value);

    /// Shared search config with the algorithm's overrides applied.
    SearchConfig search_for(Algorithm algorithm) const;

    /// Every key with its effective value, one per line, in a fixed order.
    std::string resolved_text() const;

    void validate() const;
};

/// 64-bit FNV-1a digest, rendered as 16 hex digits.
std::string digest_hex(std::string_view text);

}  // namespace tecgp
