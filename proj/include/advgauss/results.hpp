#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace advgauss {

/// One (run, sample size, estimator) measurement.
struct ResultRow {
    std::int64_t run_idx = 0;
    std::int64_t n = 0;
    std::string estimator;
    double error = 0.0;
    std::int64_t samples_total = 0;
    std::string branch;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr const char* kCsvHeader = "run_idx,n,estimator,error,samples_total,branch";

/// Shortest-round-trip-safe decimal with 17 significant digits, '.' separator,
/// independent of the global locale.
std::string format_double(double value);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
/// Throws std::runtime_error on a bad header or a malformed row.
std::vector<ResultRow> read_csv(std::istream& in);
std::vector<ResultRow> read_csv(const std::filesystem::path& path);

/// Orders rows by (run_idx, n, estimator).
void sort_rows(std::vector<ResultRow>& rows);

/// Mean and population standard deviation of `error` per (estimator, n).
struct SeriesPoint {
    std::string estimator;
    std::int64_t n = 0;
    double mean = 0.0;
    double std = 0.0;
    std::int64_t count = 0;
};

std::vector<SeriesPoint> aggregate(const std::vector<ResultRow>& rows);
void write_series_csv(std::ostream& out, const std::vector<SeriesPoint>& points);

}  // namespace advgauss
