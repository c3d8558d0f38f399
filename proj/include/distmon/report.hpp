#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "distmon/density.hpp"
#include "distmon/monitor.hpp"

namespace distmon {

inline constexpr std::size_t kDefaultBins = 30;

/// Uniformly binned 2D histogram, counts stored x-major.
struct Hist2D {
    std::vector<double> x_edges;
    std::vector<double> y_edges;
    std::vector<std::uint64_t> counts;
    std::size_t excluded = 0;  // samples with an absent coordinate

    std::size_t x_bins() const noexcept { return x_edges.size() - 1; }
    std::size_t y_bins() const noexcept { return y_edges.size() - 1; }
    std::uint64_t at(std::size_t ix, std::size_t iy) const { return counts.at(ix * y_bins() + iy); }
    std::uint64_t total() const noexcept;
};

using HistSample = std::pair<std::optional<double>, std::optional<double>>;

/// Bins span [min, max] of the present samples per axis; the last bin is
/// closed on the right. Samples with an absent coordinate are counted in
/// `excluded`. Throws EmptyInput when no sample has both coordinates, or
/// ValidationError for zero bins / non-finite values.
Hist2D hist2d(std::span<const HistSample> samples, std::size_t x_bins, std::size_t y_bins);

/// Long form: x_bin_center,y_bin_center,count (one row per bin).
void write_hist_csv(std::ostream& out, const Hist2D& h);

/// Locale-independent shortest round-trip decimal.
std::string format_double(double v);

// --- time series -----------------------------------------------------------

inline constexpr std::string_view kTimeSeriesHeader = "t,n,rho,d_min,d_avg,v,c1,c2";

void write_time_series_header(std::ostream& out);
/// Absent distances are written as empty fields.
void write_time_series_row(std::ostream& out, const FrameAssessment& a);
void write_time_series(std::ostream& out, std::span<const FrameAssessment> rows);

/// Parses what write_time_series produced (index is not a column and comes back 0).
std::vector<FrameAssessment> read_time_series(std::istream& in);

// --- assessment records (monitor output) -----------------------------------

/// {"frame", "t", "n", "rho", "v", "pair_violations", "d_min", "d_avg", "c1", "c2"};
/// absent distances are null.
std::string serialize_assessment(const FrameAssessment& a);
FrameAssessment parse_assessment(std::string_view line);

// --- fit report --------------------------------------------------------------

struct FitReport {
    RegressionFit fit;
    double level = 0.95;
    std::optional<double> rho_c;  // absent when no critical density exists
    std::string status;           // ok | already_violating | non_positive_slope
    std::optional<double> rho_skewness;
};

std::string serialize_fit_report(const FitReport& report);
FitReport parse_fit_report(std::string_view text);

/// Writes timeseries.csv, hist_rho_davg.csv and hist_rho_v.csv into `dir`.
void write_report_files(const std::string& dir, std::span<const FrameAssessment> rows, std::size_t bins);

}  // namespace distmon
