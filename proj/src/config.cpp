#include "tecgp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "tecgp/errors.hpp"

namespace tecgp {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("config key '" + std::string(key) + "': expected an integer, got '" + std::string(value) + "'");
    }
    return out;
}

double parse_real(std::string_view key, std::string_view value) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out)) {
        throw ConfigError("config key '" + std::string(key) + "': expected a number, got '" + std::string(value) + "'");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError("config key '" + std::string(key) + "': expected true or false, got '" + std::string(value) + "'");
}

std::string show(bool v) { return v ? "true" : "false"; }
std::string show(double v) { return format_double(v); }
std::string show(std::size_t v) { return std::to_string(v); }
std::string show(int v) { return std::to_string(v); }

template <typename Target>
struct Field {
    std::string key;
    std::function<void(Target&, std::string_view key, std::string_view value)> set;
    std::function<std::string(const Target&)> get;
};

#define TECGP_SIZE_FIELD(KEY, MEMBER)                                                                   \
    Field<SearchConfig> {                                                                               \
        KEY, [](SearchConfig& c, std::string_view k, std::string_view v) { c.MEMBER = parse_integer<std::size_t>(k, v); }, \
            [](const SearchConfig& c) { return show(c.MEMBER); }                                        \
    }

/// Keys that may be overridden per algorithm.
const std::vector<Field<SearchConfig>>& search_fields() {
    static const std::vector<Field<SearchConfig>> fields = {
        TECGP_SIZE_FIELD("search.population", population),
        TECGP_SIZE_FIELD("search.generations", generations),
        TECGP_SIZE_FIELD("search.neighborhood", neighborhood),
        {"search.sgp_epsilon", [](SearchConfig& c, auto k, auto v) { c.sgp_epsilon = parse_real(k, v); },
         [](const SearchConfig& c) { return show(c.sgp_epsilon); }},
        TECGP_SIZE_FIELD("search.sgp_patience", sgp_patience),
        TECGP_SIZE_FIELD("search.threads", threads),
        TECGP_SIZE_FIELD("operators.tournament_size", operators.tournament_size),
        {"operators.p_subtree", [](SearchConfig& c, auto k, auto v) { c.operators.p_subtree = parse_real(k, v); },
         [](const SearchConfig& c) { return show(c.operators.p_subtree); }},
        TECGP_SIZE_FIELD("operators.max_depth", operators.max_depth),
        TECGP_SIZE_FIELD("operators.init_depth", operators.init_depth),
        {"operators.constants",
         [](SearchConfig& c, auto k, auto v) { c.operators.primitives.use_constants = parse_bool(k, v); },
         [](const SearchConfig& c) { return show(c.operators.primitives.use_constants); }},
        {"operators.constant_min",
         [](SearchConfig& c, auto k, auto v) { c.operators.primitives.constant_min = parse_real(k, v); },
         [](const SearchConfig& c) { return show(c.operators.primitives.constant_min); }},
        {"operators.constant_max",
         [](SearchConfig& c, auto k, auto v) { c.operators.primitives.constant_max = parse_real(k, v); },
         [](const SearchConfig& c) { return show(c.operators.primitives.constant_max); }},
    };
    return fields;
}

#undef TECGP_SIZE_FIELD

std::string show_kind(DataSourceKind kind) {
    switch (kind) {
        case DataSourceKind::Synthetic: return "synthetic";
        case DataSourceKind::RawCsv: return "raw_csv";
        case DataSourceKind::EncodedCsv: return "encoded_csv";
    }
    return "synthetic";
}

std::string show_algorithms(const std::vector<Algorithm>& algorithms) {
    std::string out;
    for (const auto a : algorithms) {
        if (!out.empty()) out += ',';
        out += algorithm_name(a);
    }
    return out;
}

std::vector<Algorithm> parse_algorithms(std::string_view value) {
    std::vector<Algorithm> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const std::size_t comma = value.find(',', start);
        const auto item = trim(value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        const Algorithm a = parse_algorithm(item);
        if (std::find(out.begin(), out.end(), a) != out.end()) {
            throw ConfigError("algorithm '" + std::string(item) + "' listed twice");
        }
        out.push_back(a);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

const std::vector<Field<RunConfig>>& run_fields() {
    using C = RunConfig;
    using SV = std::string_view;
    static const std::vector<Field<RunConfig>> fields = {
        {"data.source",
         [](C& c, SV, SV v) {
             if (v == "synthetic") c.data.kind = DataSourceKind::Synthetic;
             else if (v == "raw_csv") c.data.kind = DataSourceKind::RawCsv;
             else if (v == "encoded_csv") c.data.kind = DataSourceKind::EncodedCsv;
             else throw ConfigError("data.source must be synthetic, raw_csv or encoded_csv");
         },
         [](const C& c) { return show_kind(c.data.kind); }},
        {"data.raw_csv", [](C& c, SV, SV v) { c.data.raw_csv = std::string(v); },
         [](const C& c) { return c.data.raw_csv.string(); }},
        {"data.sunspot_csv", [](C& c, SV, SV v) { c.data.sunspot_csv = std::string(v); },
         [](const C& c) { return c.data.sunspot_csv.string(); }},
        {"data.encoded_csv", [](C& c, SV, SV v) { c.data.encoded_csv = std::string(v); },
         [](const C& c) { return c.data.encoded_csv.string(); }},
        {"data.sunspot_components", [](C& c, SV k, SV v) { c.data.sunspot_components = parse_integer<std::size_t>(k, v); },
         [](const C& c) { return show(c.data.sunspot_components); }},
        {"experiment.algorithms", [](C& c, SV, SV v) { c.experiment.algorithms = parse_algorithms(v); },
         [](const C& c) { return show_algorithms(c.experiment.algorithms); }},
        {"experiment.folds", [](C& c, SV k, SV v) { c.experiment.folds = parse_integer<std::size_t>(k, v); },
         [](const C& c) { return show(c.experiment.folds); }},
        {"experiment.replicates", [](C& c, SV k, SV v) { c.experiment.replicates = parse_integer<std::size_t>(k, v); },
         [](const C& c) { return show(c.experiment.replicates); }},
        {"experiment.base_seed", [](C& c, SV k, SV v) { c.experiment.base_seed = parse_integer<std::uint64_t>(k, v); },
         [](const C& c) { return std::to_string(c.experiment.base_seed); }},
        {"experiment.fitness_fraction", [](C& c, SV k, SV v) { c.experiment.fitness_fraction = parse_real(k, v); },
         [](const C& c) { return show(c.experiment.fitness_fraction); }},
        {"synth.first_year", [](C& c, SV k, SV v) { c.synth.first_year = parse_integer<int>(k, v); },
         [](const C& c) { return show(c.synth.first_year); }},
        {"synth.last_year", [](C& c, SV k, SV v) { c.synth.last_year = parse_integer<int>(k, v); },
         [](const C& c) { return show(c.synth.last_year); }},
        {"synth.max_records", [](C& c, SV k, SV v) { c.synth.max_records = parse_integer<std::size_t>(k, v); },
         [](const C& c) { return show(c.synth.max_records); }},
        {"synth.noise", [](C& c, SV k, SV v) { c.synth.noise = parse_real(k, v); },
         [](const C& c) { return show(c.synth.noise); }},
        {"synth.base", [](C& c, SV k, SV v) { c.synth.base = parse_real(k, v); },
         [](const C& c) { return show(c.synth.base); }},
        {"synth.amplitude", [](C& c, SV k, SV v) { c.synth.amplitude = parse_real(k, v); },
         [](const C& c) { return show(c.synth.amplitude); }},
        {"synth.seasonal_depth", [](C& c, SV k, SV v) { c.synth.seasonal_depth = parse_real(k, v); },
         [](const C& c) { return show(c.synth.seasonal_depth); }},
        {"synth.peak_day", [](C& c, SV k, SV v) { c.synth.peak_day = parse_real(k, v); },
         [](const C& c) { return show(c.synth.peak_day); }},
        {"synth.ssn_mean", [](C& c, SV k, SV v) { c.synth.ssn_mean = parse_real(k, v); },
         [](const C& c) { return show(c.synth.ssn_mean); }},
        {"synth.ssn_amplitude", [](C& c, SV k, SV v) { c.synth.ssn_amplitude = parse_real(k, v); },
         [](const C& c) { return show(c.synth.ssn_amplitude); }},
        {"synth.ssn_period_months", [](C& c, SV k, SV v) { c.synth.ssn_period_months = parse_real(k, v); },
         [](const C& c) { return show(c.synth.ssn_period_months); }},
        {"synth.ssn_min_year", [](C& c, SV k, SV v) { c.synth.ssn_min_year = parse_real(k, v); },
         [](const C& c) { return show(c.synth.ssn_min_year); }},
        {"synth.ssn_noise", [](C& c, SV k, SV v) { c.synth.ssn_noise = parse_real(k, v); },
         [](const C& c) { return show(c.synth.ssn_noise); }},
    };
    return fields;
}

const Field<SearchConfig>* find_search_field(std::string_view key) {
    for (const auto& f : search_fields()) {
        if (f.key == key) return &f;
    }
    return nullptr;
}

}  // namespace

RunConfig RunConfig::desk_scale() {
    RunConfig c;
    c.synth.max_records = 5000;
    return c;
}

void RunConfig::set(std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    for (const auto& f : run_fields()) {
        if (f.key == key) {
            f.set(*this, key, value);
            return;
        }
    }
    if (const auto* f = find_search_field(key)) {
        f->set(search, key, value);
        return;
    }
    const std::size_t dot = key.find('.');
    if (dot != std::string_view::npos) {
        const auto prefix = key.substr(0, dot);
        const auto rest = key.substr(dot + 1);
        if ((prefix == "sgp" || prefix == "nsga2" || prefix == "moead") && find_search_field(rest) != nullptr) {
            // validate the value now, apply it per algorithm later
            SearchConfig probe;
            find_search_field(rest)->set(probe, key, value);
            overrides[parse_algorithm(prefix)][std::string(rest)] = std::string(value);
            return;
        }
    }
    throw ConfigError("unknown config key '" + std::string(key) + "'");
}

RunConfig RunConfig::parse(std::string_view text, const RunConfig& defaults) {
    RunConfig config = defaults;
    std::set<std::string, std::less<>> seen;
    std::size_t line_number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t newline = text.find('\n', start);
        std::string_view line = text.substr(start, newline == std::string_view::npos ? std::string_view::npos : newline - start);
        ++line_number;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) {
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError("config line " + std::to_string(line_number) + ": expected 'key = value'");
            }
            const auto key = trim(line.substr(0, eq));
            if (!seen.insert(std::string(key)).second) {
                throw ConfigError("config line " + std::to_string(line_number) + ": key '" + std::string(key) +
                                  "' set twice");
            }
            try {
                config.set(key, line.substr(eq + 1));
            } catch (const ConfigError& e) {
                throw ConfigError("config line " + std::to_string(line_number) + ": " + e.what());
            }
        }
        if (newline == std::string_view::npos) break;
        start = newline + 1;
    }
    return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path, const RunConfig& defaults) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse(buffer.str(), defaults);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

SearchConfig RunConfig::search_for(Algorithm algorithm) const {
    SearchConfig out = search;
    if (const auto it = overrides.find(algorithm); it != overrides.end()) {
        for (const auto& [key, value] : it->second) find_search_field(key)->set(out, key, value);
    }
    return out;
}

std::string RunConfig::resolved_text() const {
    std::ostringstream out;
    for (const auto& f : run_fields()) out << f.key << " = " << f.get(*this) << '\n';
    for (const auto& f : search_fields()) out << f.key << " = " << f.get(search) << '\n';
    for (const auto& [algorithm, keys] : overrides) {
        const SearchConfig effective = search_for(algorithm);
        for (const auto& [key, value] : keys) {
            out << algorithm_name(algorithm) << '.' << key << " = " << find_search_field(key)->get(effective) << '\n';
        }
    }
    return out.str();
}

void RunConfig::validate() const {
    synth.validate();
    search.validate();
    for (const auto& [algorithm, keys] : overrides) search_for(algorithm).validate();
    if (experiment.algorithms.empty()) throw ConfigError("experiment.algorithms must not be empty");
    if (experiment.folds < 2) throw ConfigError("experiment.folds must be >= 2");
    if (experiment.replicates < 1) throw ConfigError("experiment.replicates must be >= 1");
    if (!(experiment.fitness_fraction > 0.0 && experiment.fitness_fraction < 1.0)) {
        throw ConfigError("experiment.fitness_fraction must lie in (0, 1)");
    }
    if (data.sunspot_components < 1) throw ConfigError("data.sunspot_components must be >= 1");
    if (data.kind == DataSourceKind::RawCsv && (data.raw_csv.empty() || data.sunspot_csv.empty())) {
        throw ConfigError("data.source = raw_csv needs data.raw_csv and data.sunspot_csv");
    }
    if (data.kind == DataSourceKind::EncodedCsv && data.encoded_csv.empty()) {
        throw ConfigError("data.source = encoded_csv needs data.encoded_csv");
    }
}

std::string digest_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace tecgp
