#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "tecgp/errors.hpp"
#include "tecgp/exprtree.hpp"
#include "tecgp/rng.hpp"

namespace tecgp {

/// One hourly vTEC observation.
struct RawRecord {
    int year = 2000;
    int daynum = 1;  // 1..365
    int hour = 0;    // 0..23
    double vtec = 0.0;

    friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

/// Model inputs for one record plus the measured target.
struct EncodedRow {
    double sinhour = 0.0;
    double coshour = 1.0;
    double sinday = 0.0;
    double cosday = 1.0;
    double ssn = 0.0;
    double target_vtec = 0.0;

    FeatureRow features() const { return {sinhour, coshour, sinday, cosday, ssn}; }

    friend bool operator==(const EncodedRow&, const EncodedRow&) = default;
};

/// Column-major store of encoded rows, the layout the batch evaluator reads.
class EncodedDataset {
public:
    EncodedDataset() = default;
    explicit EncodedDataset(std::span<const EncodedRow> rows);

    std::size_t size() const { return targets_.size(); }
    bool empty() const { return targets_.empty(); }

    FeatureColumns columns() const;
    std::span<const double> targets() const { return targets_; }
    EncodedRow row(std::size_t i) const;
    std::vector<EncodedRow> rows() const;

    /// Rows at `indices`, in the given order.
    EncodedDataset subset(std::span<const std::size_t> indices) const;

    void push_back(const EncodedRow& row);

private:
    std::array<std::vector<double>, kFeatureCount> features_;
    std::vector<double> targets_;
};

// ---------------------------------------------------------------------------
// Feature encoding

/// Quadrature components (sin, cos) of 2*pi*hour/24. Throws DataError unless
/// 0 <= hour <= 23.
std::pair<double, double> encode_hour(int hour);

/// Quadrature components (sin, cos) of 2*pi*daynum/365. Throws DataError
/// unless 1 <= daynum <= 365.
std::pair<double, double> encode_day(int daynum);

/// Continuous time axis shared by sunspot series and hourly records: months
/// elapsed since 2000-01-01, on a 365-day year.
double month_midpoint(int year, int month);
double record_time_months(const RawRecord& record);

// ---------------------------------------------------------------------------
// Solar activity index

struct SunspotSample {
    int year = 2000;
    int month = 1;  // 1..12
    double mean_ssn = 0.0;

    friend bool operator==(const SunspotSample&, const SunspotSample&) = default;
};

struct SinusoidComponent {
    double amplitude = 0.0;
    double angular_frequency = 0.0;  // radians per month
    double phase = 0.0;
};

/// mean_level + sum_k amplitude_k * sin(angular_frequency_k * t + phase_k),
/// t in months (see month_midpoint).
struct SunspotModel {
    double mean_level = 0.0;
    std::vector<SinusoidComponent> components;
    double residual_rmse = 0.0;  // RMSE of the fit on its training series

    double evaluate(double t_months) const;
};

/// Least-squares fit of a mean plus `n_components` sinusoids.
///
/// Components are added one at a time: a frequency grid scan (which always
/// contains the 132-month solar cycle) picks the next component on top of the
/// ones already present, then every frequency is polished by golden-section
/// search. Amplitudes and phases come from the linear solve at fixed
/// frequencies. The fit with n components extends the fit with n - 1, so the
/// residual never grows with n.
SunspotModel fit_sinusoids(std::span<const double> t, std::span<const double> y, std::size_t n_components);

SunspotModel fit_sunspot(std::span<const SunspotSample> monthly, std::size_t n_components);

EncodedRow encode_record(const RawRecord& record, const SunspotModel& sunspots);
std::vector<EncodedRow> encode_records(std::span<const RawRecord> records, const SunspotModel& sunspots);

// ---------------------------------------------------------------------------
// Cross-validation bookkeeping

/// k contiguous blocks over [0, n). Block f is [boundaries[f], boundaries[f+1]).
struct FoldPlan {
    std::vector<std::size_t> boundaries;

    std::size_t fold_count() const { return boundaries.size() - 1; }
    std::size_t row_count() const { return boundaries.back(); }
    std::vector<std::size_t> test_indices(std::size_t fold) const;
    /// All indices outside `fold`, ascending.
    std::vector<std::size_t> training_indices(std::size_t fold) const;
};

/// Earliest blocks absorb the n % k remainder rows.
FoldPlan build_folds(std::size_t n, std::size_t k = 10);

/// As above, additionally rejecting records that are not in chronological order.
FoldPlan build_folds(std::span<const RawRecord> records, std::size_t k = 10);

struct TrainingSplit {
    std::vector<std::size_t> fitness;
    std::vector<std::size_t> validation;
};

/// Uniform random partition; |fitness| = floor(fraction * n + 0.5). Both
/// parts are returned in ascending index order.
TrainingSplit split_training(std::span<const std::size_t> training, double fraction, Rng& rng);

// ---------------------------------------------------------------------------
// Synthetic data

/// Parameters of the synthetic vTEC generator.
///
///   vtec = base + amplitude * solar * diurnal * seasonal + N(0, noise^2), clipped at 0
///   diurnal  = max(0, sin(pi * (hour - 5) / 14))
///   seasonal = 1 + seasonal_depth * cos(2*pi*(daynum - peak_day) / 365)
///   solar    = 0.5 + ssn / 100
///   ssn(t)   = ssn_mean - ssn_amplitude * cos(2*pi*(t - t_min) / ssn_period_months)
///
/// with t in months (record_time_months) and t_min the month of ssn_min_year.
struct SynthConfig {
    int first_year = 1998;
    int last_year = 2009;
    std::size_t max_records = 0;  // 0 keeps every hourly record
    double noise = 2.0;
    double base = 5.0;
    double amplitude = 20.0;
    double seasonal_depth = 0.35;
    double peak_day = 172.0;
    double ssn_mean = 80.0;
    double ssn_amplitude = 70.0;
    double ssn_period_months = 132.0;
    double ssn_min_year = 1996.5;
    double ssn_noise = 8.0;  // noise on the emitted monthly sunspot series

    void validate() const;
};

double synth_ssn(const SynthConfig& config, double t_months);
double synth_vtec_noiseless(const SynthConfig& config, int year, int daynum, int hour);

/// Hourly records over [first_year, last_year] (365 days per year), in
/// chronological order. With max_records set, a uniform random subset of that
/// size is kept, still in chronological order.
std::vector<RawRecord> synth_vtec(const SynthConfig& config, Rng& rng);

/// Monthly mean sunspot series over the same years.
std::vector<SunspotSample> synth_sunspots(const SynthConfig& config, Rng& rng);

// ---------------------------------------------------------------------------
// CSV files
//
//   raw      year,daynum,hour,vtec
//   encoded  sinhour,coshour,sinday,cosday,ssn,vtec
//   sunspot  year,month,mean_ssn
//
// Readers throw DataError naming the file line on any schema or range
// violation. Day 366 is folded onto day 365.

std::vector<RawRecord> load_raw_csv(const std::filesystem::path& path);
void write_raw_csv(std::span<const RawRecord> records, const std::filesystem::path& path);

std::vector<EncodedRow> load_encoded_csv(const std::filesystem::path& path);
void write_encoded_csv(std::span<const EncodedRow> rows, const std::filesystem::path& path);

std::vector<SunspotSample> load_sunspot_csv(const std::filesystem::path& path);
void write_sunspot_csv(std::span<const SunspotSample> samples, const std::filesystem::path& path);

}  // namespace tecgp
