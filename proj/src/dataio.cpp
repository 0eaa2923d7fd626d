#include "tecgp/dataio.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

namespace tecgp {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDaysPerYear = 365.0;
}  // namespace

// ---------------------------------------------------------------------------
// EncodedDataset

EncodedDataset::EncodedDataset(std::span<const EncodedRow> rows) {
    for (auto& col : features_) col.reserve(rows.size());
    targets_.reserve(rows.size());
    for (const auto& r : rows) push_back(r);
}

void EncodedDataset::push_back(const EncodedRow& row) {
    const FeatureRow f = row.features();
    for (std::size_t v = 0; v < kFeatureCount; ++v) features_[v].push_back(f[v]);
    targets_.push_back(row.target_vtec);
}

FeatureColumns EncodedDataset::columns() const {
    FeatureColumns cols;
    for (std::size_t v = 0; v < kFeatureCount; ++v) cols[v] = features_[v];
    return cols;
}

EncodedRow EncodedDataset::row(std::size_t i) const {
    return {features_[0].at(i), features_[1][i], features_[2][i], features_[3][i], features_[4][i], targets_[i]};
}

std::vector<EncodedRow> EncodedDataset::rows() const {
    std::vector<EncodedRow> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(row(i));
    return out;
}

EncodedDataset EncodedDataset::subset(std::span<const std::size_t> indices) const {
    EncodedDataset out;
    for (auto& col : out.features_) col.reserve(indices.size());
    out.targets_.reserve(indices.size());
    for (const std::size_t i : indices) out.push_back(row(i));
    return out;
}

// ---------------------------------------------------------------------------
// Encoding

std::pair<double, double> encode_hour(int hour) {
    if (hour < 0 || hour > 23) {
        throw DataError("hour out of range [0, 23]: " + std::to_string(hour));
    }
    const double angle = kTwoPi * static_cast<double>(hour) / 24.0;
    return {std::sin(angle), std::cos(angle)};
}

std::pair<double, double> encode_day(int daynum) {
    if (daynum < 1 || daynum > 365) {
        throw DataError("daynum out of range [1, 365]: " + std::to_string(daynum));
    }
    const double angle = kTwoPi * static_cast<double>(daynum) / kDaysPerYear;
    return {std::sin(angle), std::cos(angle)};
}

double month_midpoint(int year, int month) {
    return 12.0 * static_cast<double>(year - 2000) + static_cast<double>(month - 1) + 0.5;
}

double record_time_months(const RawRecord& record) {
    const double day_fraction =
        (static_cast<double>(record.daynum - 1) + (static_cast<double>(record.hour) + 0.5) / 24.0) / kDaysPerYear;
    return 12.0 * (static_cast<double>(record.year - 2000) + day_fraction);
}

double SunspotModel::evaluate(double t_months) const {
    double value = mean_level;
    for (const auto& c : components) {
        value += c.amplitude * std::sin(c.angular_frequency * t_months + c.phase);
    }
    return value;
}

EncodedRow encode_record(const RawRecord& record, const SunspotModel& sunspots) {
    const auto [sh, ch] = encode_hour(record.hour);
    const auto [sd, cd] = encode_day(record.daynum);
    return {sh, ch, sd, cd, sunspots.evaluate(record_time_months(record)), record.vtec};
}

std::vector<EncodedRow> encode_records(std::span<const RawRecord> records, const SunspotModel& sunspots) {
    std::vector<EncodedRow> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(encode_record(r, sunspots));
    return out;
}

// ---------------------------------------------------------------------------
// Sinusoid fitting

namespace {

struct LinearFit {
    Eigen::VectorXd coefficients;  // [mean, s_1, c_1, s_2, c_2, ...]
    double sse = 0.0;
};

LinearFit solve_linear(const Eigen::VectorXd& t, const Eigen::VectorXd& y, const std::vector<double>& omegas) {
    const Eigen::Index n = t.size();
    Eigen::MatrixXd basis(n, 1 + 2 * static_cast<Eigen::Index>(omegas.size()));
    basis.col(0).setOnes();
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        const auto col = 1 + 2 * static_cast<Eigen::Index>(k);
        basis.col(col) = (omegas[k] * t).array().sin();
        basis.col(col + 1) = (omegas[k] * t).array().cos();
    }
    LinearFit fit;
    fit.coefficients = basis.colPivHouseholderQr().solve(y);
    fit.sse = (basis * fit.coefficients - y).squaredNorm();
    return fit;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, int iterations) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < iterations; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

}  // namespace

SunspotModel fit_sinusoids(std::span<const double> t, std::span<const double> y, std::size_t n_components) {
    if (t.size() != y.size()) {
        throw std::invalid_argument("fit_sinusoids: t and y differ in length");
    }
    if (n_components < 1) {
        throw std::invalid_argument("fit_sinusoids: n_components must be >= 1");
    }
    const std::size_t free_parameters = 1 + 3 * n_components;
    if (t.size() < 24 || t.size() < free_parameters) {
        throw DataError("fit_sinusoids: " + std::to_string(t.size()) + " samples cannot fit " +
                        std::to_string(n_components) + " components (need >= 24 and >= " +
                        std::to_string(free_parameters) + ")");
    }

    const Eigen::VectorXd tv = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
    const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));

    std::vector<double> sorted(t.begin(), t.end());
    std::sort(sorted.begin(), sorted.end());
    const double span = sorted.back() - sorted.front();
    std::vector<double> gaps;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] > sorted[i - 1]) gaps.push_back(sorted[i] - sorted[i - 1]);
    }
    if (gaps.empty() || span <= 0.0) {
        throw DataError("fit_sinusoids: sample times must not all coincide");
    }
    std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
    const double typical_step = gaps[gaps.size() / 2];

    // Frequency grid from periods of twice the span down to just above Nyquist,
    // oversampled eightfold relative to the natural resolution 2*pi/span.
    const double omega_lo = kTwoPi / (2.0 * span);
    const double omega_hi = 0.98 * std::numbers::pi / typical_step;
    const double omega_step = kTwoPi / (8.0 * span);
    std::vector<double> grid;
    for (double w = omega_lo; w <= omega_hi; w += omega_step) grid.push_back(w);
    grid.push_back(kTwoPi / 132.0);  // eleven-year solar cycle

    std::vector<double> omegas;
    double current_sse = solve_linear(tv, yv, omegas).sse;

    for (std::size_t k = 0; k < n_components; ++k) {
        double best_omega = grid.front();
        double best_sse = std::numeric_limits<double>::infinity();
        for (const double w : grid) {
            auto trial = omegas;
            trial.push_back(w);
            const double sse = solve_linear(tv, yv, trial).sse;
            if (sse < best_sse) {
                best_sse = sse;
                best_omega = w;
            }
        }
        omegas.push_back(best_omega);
        current_sse = std::min(current_sse, best_sse);
        current_sse = solve_linear(tv, yv, omegas).sse;

        // Polish each frequency with the others held fixed; keep only gains.
        for (int sweep = 0; sweep < 3; ++sweep) {
            for (std::size_t j = 0; j < omegas.size(); ++j) {
                auto objective = [&](double w) {
                    auto trial = omegas;
                    trial[j] = w;
                    return solve_linear(tv, yv, trial).sse;
                };
                const double lo = std::max(omegas[j] - omega_step, omega_lo * 0.5);
                const double hi = omegas[j] + omega_step;
                const double candidate = golden_section(objective, lo, hi, 60);
                const double sse = objective(candidate);
                if (sse < current_sse) {
                    omegas[j] = candidate;
                    current_sse = sse;
                }
            }
        }
    }

    const LinearFit fit = solve_linear(tv, yv, omegas);
    SunspotModel model;
    model.mean_level = fit.coefficients(0);
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        const double s = fit.coefficients(1 + 2 * static_cast<Eigen::Index>(k));
        const double c = fit.coefficients(2 + 2 * static_cast<Eigen::Index>(k));
        // s*sin(wt) + c*cos(wt) = a*sin(wt + phi) with a*cos(phi) = s, a*sin(phi) = c
        model.components.push_back({std::hypot(s, c), omegas[k], std::atan2(c, s)});
    }
    model.residual_rmse = std::sqrt(fit.sse / static_cast<double>(t.size()));
    return model;
}

SunspotModel fit_sunspot(std::span<const SunspotSample> monthly, std::size_t n_components) {
    std::vector<double> t;
    std::vector<double> y;
    t.reserve(monthly.size());
    y.reserve(monthly.size());
    for (const auto& s : monthly) {
        t.push_back(month_midpoint(s.year, s.month));
        y.push_back(s.mean_ssn);
    }
    return fit_sinusoids(t, y, n_components);
}

// ---------------------------------------------------------------------------
// Folds and splits

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = boundaries.at(fold); i < boundaries.at(fold + 1); ++i) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::training_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    const std::size_t lo = boundaries.at(fold);
    const std::size_t hi = boundaries.at(fold + 1);
    for (std::size_t i = 0; i < row_count(); ++i) {
        if (i < lo || i >= hi) out.push_back(i);
    }
    return out;
}

FoldPlan build_folds(std::size_t n, std::size_t k) {
    if (k < 1) {
        throw std::invalid_argument("build_folds: k must be >= 1");
    }
    if (n < k) {
        throw DataError("build_folds: " + std::to_string(n) + " rows cannot fill " + std::to_string(k) + " folds");
    }
    FoldPlan plan;
    plan.boundaries.push_back(0);
    const std::size_t base = n / k;
    const std::size_t remainder = n % k;
    for (std::size_t f = 0; f < k; ++f) {
        plan.boundaries.push_back(plan.boundaries.back() + base + (f < remainder ? 1 : 0));
    }
    return plan;
}

FoldPlan build_folds(std::span<const RawRecord> records, std::size_t k) {
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& a = records[i - 1];
        const auto& b = records[i];
        if (std::tie(b.year, b.daynum, b.hour) < std::tie(a.year, a.daynum, a.hour)) {
            throw DataError("build_folds: records are not in chronological order at row " + std::to_string(i));
        }
    }
    return build_folds(records.size(), k);
}

TrainingSplit split_training(std::span<const std::size_t> training, double fraction, Rng& rng) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("split_training: fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> shuffled(training.begin(), training.end());
    shuffle(shuffled, rng);
    const auto n_fitness = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(shuffled.size()) + 0.5));
    TrainingSplit split;
    split.fitness.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_fitness));
    split.validation.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_fitness), shuffled.end());
    std::sort(split.fitness.begin(), split.fitness.end());
    std::sort(split.validation.begin(), split.validation.end());
    return split;
}

// ---------------------------------------------------------------------------
// Synthetic generator

void SynthConfig::validate() const {
    if (last_year < first_year) {
        throw ConfigError("synthetic data: empty year range " + std::to_string(first_year) + ":" +
                          std::to_string(last_year));
    }
    if (!(noise >= 0.0) || !(ssn_noise >= 0.0)) {
        throw ConfigError("synthetic data: noise levels must be >= 0");
    }
    if (!(ssn_period_months > 0.0)) {
        throw ConfigError("synthetic data: ssn period must be positive");
    }
}

double synth_ssn(const SynthConfig& config, double t_months) {
    const double t_min = 12.0 * (config.ssn_min_year - 2000.0);
    return config.ssn_mean - config.ssn_amplitude * std::cos(kTwoPi * (t_months - t_min) / config.ssn_period_months);
}

double synth_vtec_noiseless(const SynthConfig& config, int year, int daynum, int hour) {
    const double diurnal = std::max(0.0, std::sin(std::numbers::pi * (static_cast<double>(hour) - 5.0) / 14.0));
    const double seasonal =
        1.0 + config.seasonal_depth * std::cos(kTwoPi * (static_cast<double>(daynum) - config.peak_day) / kDaysPerYear);
    const double ssn = synth_ssn(config, record_time_months({year, daynum, hour, 0.0}));
    const double solar = 0.5 + ssn / 100.0;
    return config.base + config.amplitude * solar * diurnal * seasonal;
}

std::vector<RawRecord> synth_vtec(const SynthConfig& config, Rng& rng) {
    config.validate();
    const std::size_t years = static_cast<std::size_t>(config.last_year - config.first_year + 1);
    const std::size_t total = years * 365 * 24;

    std::vector<std::size_t> keep;
    if (config.max_records > 0 && config.max_records < total) {
        std::vector<std::size_t> all(total);
        for (std::size_t i = 0; i < total; ++i) all[i] = i;
        // partial Fisher-Yates: the first max_records slots form the sample
        for (std::size_t i = 0; i < config.max_records; ++i) {
            const auto j = i + rng.uniform_index(total - i);
            std::swap(all[i], all[j]);
        }
        keep.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(config.max_records));
        std::sort(keep.begin(), keep.end());
    } else {
        keep.resize(total);
        for (std::size_t i = 0; i < total; ++i) keep[i] = i;
    }

    std::vector<RawRecord> records;
    records.reserve(keep.size());
    for (const std::size_t idx : keep) {
        const int year = config.first_year + static_cast<int>(idx / (365 * 24));
        const int daynum = 1 + static_cast<int>((idx / 24) % 365);
        const int hour = static_cast<int>(idx % 24);
        double vtec = synth_vtec_noiseless(config, year, daynum, hour);
        if (config.noise > 0.0) vtec += rng.normal(0.0, config.noise);
        records.push_back({year, daynum, hour, std::max(0.0, vtec)});
    }
    return records;
}

std::vector<SunspotSample> synth_sunspots(const SynthConfig& config, Rng& rng) {
    config.validate();
    std::vector<SunspotSample> samples;
    for (int year = config.first_year; year <= config.last_year; ++year) {
        for (int month = 1; month <= 12; ++month) {
            double value = synth_ssn(config, month_midpoint(year, month));
            if (config.ssn_noise > 0.0) value += rng.normal(0.0, config.ssn_noise);
            samples.push_back({year, month, std::max(0.0, value)});
        }
    }
    return samples;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
        fields.push_back(field);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

class CsvReader {
public:
    CsvReader(const std::filesystem::path& path, std::string_view expected_header)
        : path_(path), in_(path) {
        if (!in_) {
            throw DataError("cannot open " + path.string());
        }
        if (!next_line()) {
            throw DataError(path.string() + ": missing header, expected '" + std::string(expected_header) + "'");
        }
        if (line_ != expected_header) {
            throw DataError(where() + ": bad header '" + line_ + "', expected '" + std::string(expected_header) + "'");
        }
    }

    /// Advances to the next non-empty line and splits it into `count` fields.
    bool next_row(std::size_t count, std::vector<std::string_view>& fields) {
        while (next_line()) {
            if (line_.empty()) continue;
            fields = split_fields(line_);
            if (fields.size() != count) {
                throw DataError(where() + ": expected " + std::to_string(count) + " fields, found " +
                                std::to_string(fields.size()));
            }
            return true;
        }
        return false;
    }

    std::string where() const { return path_.string() + ":" + std::to_string(line_number_); }

    int to_int(std::string_view field, const char* name) const {
        int value = 0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size()) {
            throw DataError(where() + ": unparseable " + name + " '" + std::string(field) + "'");
        }
        return value;
    }

    double to_double(std::string_view field, const char* name) const {
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
            throw DataError(where() + ": unparseable " + name + " '" + std::string(field) + "'");
        }
        return value;
    }

private:
    bool next_line() {
        if (!std::getline(in_, line_)) return false;
        ++line_number_;
        if (!line_.empty() && line_.back() == '\r') line_.pop_back();
        return true;
    }

    std::filesystem::path path_;
    std::ifstream in_;
    std::string line_;
    std::size_t line_number_ = 0;
};

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    return out;
}

constexpr std::string_view kRawHeader = "year,daynum,hour,vtec";
constexpr std::string_view kEncodedHeader = "sinhour,coshour,sinday,cosday,ssn,vtec";
constexpr std::string_view kSunspotHeader = "year,month,mean_ssn";

}  // namespace

std::vector<RawRecord> load_raw_csv(const std::filesystem::path& path) {
    CsvReader reader(path, kRawHeader);
    std::vector<RawRecord> records;
    std::vector<std::string_view> f;
    while (reader.next_row(4, f)) {
        RawRecord r;
        r.year = reader.to_int(f[0], "year");
        r.daynum = reader.to_int(f[1], "daynum");
        r.hour = reader.to_int(f[2], "hour");
        r.vtec = reader.to_double(f[3], "vtec");
        if (r.daynum == 366) r.daynum = 365;
        if (r.daynum < 1 || r.daynum > 365) {
            throw DataError(reader.where() + ": daynum " + std::to_string(r.daynum) + " outside [1, 365]");
        }
        if (r.hour < 0 || r.hour > 23) {
            throw DataError(reader.where() + ": hour " + std::to_string(r.hour) + " outside [0, 23]");
        }
        if (r.vtec < 0.0) {
            throw DataError(reader.where() + ": negative vtec");
        }
        records.push_back(r);
    }
    return records;
}

void write_raw_csv(std::span<const RawRecord> records, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << kRawHeader << '\n';
    for (const auto& r : records) {
        out << r.year << ',' << r.daynum << ',' << r.hour << ',' << format_double(r.vtec) << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

std::vector<EncodedRow> load_encoded_csv(const std::filesystem::path& path) {
    CsvReader reader(path, kEncodedHeader);
    std::vector<EncodedRow> rows;
    std::vector<std::string_view> f;
    while (reader.next_row(6, f)) {
        EncodedRow r;
        r.sinhour = reader.to_double(f[0], "sinhour");
        r.coshour = reader.to_double(f[1], "coshour");
        r.sinday = reader.to_double(f[2], "sinday");
        r.cosday = reader.to_double(f[3], "cosday");
        r.ssn = reader.to_double(f[4], "ssn");
        r.target_vtec = reader.to_double(f[5], "vtec");
        for (const double q : {r.sinhour, r.coshour, r.sinday, r.cosday}) {
            if (q < -1.0 || q > 1.0) {
                throw DataError(reader.where() + ": quadrature component outside [-1, 1]");
            }
        }
        rows.push_back(r);
    }
    return rows;
}

void write_encoded_csv(std::span<const EncodedRow> rows, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << kEncodedHeader << '\n';
    for (const auto& r : rows) {
        out << format_double(r.sinhour) << ',' << format_double(r.coshour) << ',' << format_double(r.sinday) << ','
            << format_double(r.cosday) << ',' << format_double(r.ssn) << ',' << format_double(r.target_vtec) << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

std::vector<SunspotSample> load_sunspot_csv(const std::filesystem::path& path) {
    CsvReader reader(path, kSunspotHeader);
    std::vector<SunspotSample> samples;
    std::vector<std::string_view> f;
    while (reader.next_row(3, f)) {
        SunspotSample s;
        s.year = reader.to_int(f[0], "year");
        s.month = reader.to_int(f[1], "month");
        s.mean_ssn = reader.to_double(f[2], "mean_ssn");
        if (s.month < 1 || s.month > 12) {
            throw DataError(reader.where() + ": month " + std::to_string(s.month) + " outside [1, 12]");
        }
        samples.push_back(s);
    }
    return samples;
}

void write_sunspot_csv(std::span<const SunspotSample> samples, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << kSunspotHeader << '\n';
    for (const auto& s : samples) {
        out << s.year << ',' << s.month << ',' << format_double(s.mean_ssn) << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace tecgp
