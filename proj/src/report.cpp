#include "distmon/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>

#include "distmon/error.hpp"

namespace distmon {
namespace {

using nlohmann::json;

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    std::vector<double> edges(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) edges[i] = lo + width * static_cast<double>(i);
    edges.back() = hi;
    return edges;
}

std::size_t bin_of(const std::vector<double>& edges, double v) {
    const std::size_t bins = edges.size() - 1;
    const double lo = edges.front(), hi = edges.back();
    auto i = static_cast<std::size_t>(std::floor((v - lo) / (hi - lo) * static_cast<double>(bins)));
    return std::min(i, bins - 1);
}

std::optional<double> optional_number(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw MalformedRecord(std::string(key) + " is not a number");
    return it->get<double>();
}

template <typename T>
T required(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) throw MalformedRecord(std::string(key) + " missing");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw MalformedRecord(std::string(key) + " has the wrong type");
    }
}

json parse_json(std::string_view text) {
    json j = json::parse(text.begin(), text.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw MalformedRecord("not a JSON object");
    return j;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_field(std::string_view s, const char* name) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw MalformedRecord(std::string("bad ") + name + " field");
    return v;
}

}  // namespace

std::uint64_t Hist2D::total() const noexcept { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

Hist2D hist2d(std::span<const HistSample> samples, std::size_t x_bins, std::size_t y_bins) {
    if (x_bins == 0 || y_bins == 0) throw ValidationError("histogram needs at least one bin per axis");
    Hist2D h;
    std::vector<std::pair<double, double>> present;
    present.reserve(samples.size());
    for (const auto& [x, y] : samples) {
        if (!x || !y) {
            ++h.excluded;
            continue;
        }
        if (!std::isfinite(*x) || !std::isfinite(*y)) throw ValidationError("histogram samples must be finite");
        present.emplace_back(*x, *y);
    }
    if (present.empty()) throw EmptyInput("no samples with both coordinates present");

    const auto [xmin, xmax] = std::minmax_element(present.begin(), present.end(),
                                                  [](auto& a, auto& b) { return a.first < b.first; });
    const auto [ymin, ymax] = std::minmax_element(present.begin(), present.end(),
                                                  [](auto& a, auto& b) { return a.second < b.second; });
    h.x_edges = uniform_edges(xmin->first, xmax->first, x_bins);
    h.y_edges = uniform_edges(ymin->second, ymax->second, y_bins);
    h.counts.assign(x_bins * y_bins, 0);
    for (const auto& [x, y] : present) ++h.counts[bin_of(h.x_edges, x) * y_bins + bin_of(h.y_edges, y)];
    return h;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_hist_csv(std::ostream& out, const Hist2D& h) {
    out << "x_bin_center,y_bin_center,count\n";
    for (std::size_t ix = 0; ix < h.x_bins(); ++ix) {
        const double xc = 0.5 * (h.x_edges[ix] + h.x_edges[ix + 1]);
        for (std::size_t iy = 0; iy < h.y_bins(); ++iy) {
            const double yc = 0.5 * (h.y_edges[iy] + h.y_edges[iy + 1]);
            out << format_double(xc) << ',' << format_double(yc) << ',' << h.at(ix, iy) << '\n';
        }
    }
}

void write_time_series_header(std::ostream& out) { out << kTimeSeriesHeader << '\n'; }

void write_time_series_row(std::ostream& out, const FrameAssessment& a) {
    out << format_double(a.timestamp) << ',' << a.n << ',' << format_double(a.rho) << ','
        << (a.d_min ? format_double(*a.d_min) : "") << ',' << (a.d_avg ? format_double(*a.d_avg) : "") << ','
        << a.v << ',' << int{a.c1} << ',' << int{a.c2} << '\n';
}

void write_time_series(std::ostream& out, std::span<const FrameAssessment> rows) {
    write_time_series_header(out);
    for (const auto& a : rows) write_time_series_row(out, a);
}

std::vector<FrameAssessment> read_time_series(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTimeSeriesHeader) throw MalformedRecord("missing time series header");
    std::vector<FrameAssessment> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 8) throw MalformedRecord("time series row needs 8 fields");
        FrameAssessment a;
        a.timestamp = parse_field<double>(f[0], "t");
        a.n = parse_field<std::size_t>(f[1], "n");
        a.rho = parse_field<double>(f[2], "rho");
        if (!f[3].empty()) a.d_min = parse_field<double>(f[3], "d_min");
        if (!f[4].empty()) a.d_avg = parse_field<double>(f[4], "d_avg");
        a.v = parse_field<std::uint64_t>(f[5], "v");
        a.pair_violations = a.v / 2;
        a.c1 = parse_field<int>(f[6], "c1") != 0;
        a.c2 = parse_field<int>(f[7], "c2") != 0;
        rows.push_back(a);
    }
    return rows;
}

std::string serialize_assessment(const FrameAssessment& a) {
    nlohmann::ordered_json j = {{"frame", a.index},
              {"t", a.timestamp},
              {"n", a.n},
              {"rho", a.rho},
              {"v", a.v},
              {"pair_violations", a.pair_violations},
              {"d_min", a.d_min ? nlohmann::ordered_json(*a.d_min) : nlohmann::ordered_json(nullptr)},
              {"d_avg", a.d_avg ? nlohmann::ordered_json(*a.d_avg) : nlohmann::ordered_json(nullptr)},
              {"c1", int{a.c1}},
              {"c2", int{a.c2}}};
    return j.dump();
}

FrameAssessment parse_assessment(std::string_view line) {
    const json j = parse_json(line);
    FrameAssessment a;
    a.index = required<std::int64_t>(j, "frame");
    a.timestamp = required<double>(j, "t");
    a.n = required<std::size_t>(j, "n");
    a.rho = required<double>(j, "rho");
    a.v = required<std::uint64_t>(j, "v");
    a.pair_violations = required<std::uint64_t>(j, "pair_violations");
    a.d_min = optional_number(j, "d_min");
    a.d_avg = optional_number(j, "d_avg");
    a.c1 = required<int>(j, "c1") != 0;
    a.c2 = required<int>(j, "c2") != 0;
    return a;
}

std::string serialize_fit_report(const FitReport& r) {
    using ordered = nlohmann::ordered_json;
    const auto opt = [](const std::optional<double>& v) { return v ? ordered(*v) : ordered(nullptr); };
    ordered j = {{"beta0", r.fit.beta0},
              {"beta1", r.fit.beta1},
              {"s", r.fit.s},
              {"n", r.fit.n_samples},
              {"rho_mean", r.fit.rho_mean},
              {"s_xx", r.fit.s_xx},
              {"r_squared", r.fit.r_squared},
              {"rho_max", r.fit.rho_max},
              {"rho_c", opt(r.rho_c)},
              {"level", r.level},
              {"status", r.status},
              {"rho_skewness", opt(r.rho_skewness)}};
    return j.dump(2);
}

FitReport parse_fit_report(std::string_view text) {
    const json j = parse_json(text);
    FitReport r;
    r.fit.beta0 = required<double>(j, "beta0");
    r.fit.beta1 = required<double>(j, "beta1");
    r.fit.s = required<double>(j, "s");
    r.fit.n_samples = required<std::size_t>(j, "n");
    r.fit.rho_mean = required<double>(j, "rho_mean");
    r.fit.s_xx = required<double>(j, "s_xx");
    r.fit.r_squared = required<double>(j, "r_squared");
    r.fit.rho_max = optional_number(j, "rho_max").value_or(r.fit.rho_mean);
    r.level = required<double>(j, "level");
    r.rho_c = optional_number(j, "rho_c");
    r.status = required<std::string>(j, "status");
    r.rho_skewness = optional_number(j, "rho_skewness");
    return r;
}

void write_report_files(const std::string& dir, std::span<const FrameAssessment> rows, std::size_t bins) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path base(dir);

    std::ofstream ts(base / "timeseries.csv");
    if (!ts) throw Error("cannot write timeseries.csv in '" + dir + "'");
    write_time_series(ts, rows);

    std::vector<HistSample> rho_davg, rho_v;
    rho_davg.reserve(rows.size());
    rho_v.reserve(rows.size());
    for (const auto& a : rows) {
        rho_davg.emplace_back(a.rho, a.d_avg);
        rho_v.emplace_back(a.rho, static_cast<double>(a.v));
    }

    const auto write_hist = [&](const char* name, std::span<const HistSample> samples) {
        std::ofstream out(base / name);
        if (!out) throw Error(std::string("cannot write ") + name);
        // No usable samples still yields a header so downstream tooling sees every file.
        try {
            write_hist_csv(out, hist2d(samples, bins, bins));
        } catch (const EmptyInput&) {
            out << "x_bin_center,y_bin_center,count\n";
        }
    };
    write_hist("hist_rho_davg.csv", rho_davg);
    write_hist("hist_rho_v.csv", rho_v);
}

}  // namespace distmon
