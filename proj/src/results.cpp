#include "advgauss/results.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace advgauss {

std::string format_double(double value) {
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buffer, end);
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << kCsvHeader << '\n';
    for (const ResultRow& row : rows) {
        out << row.run_idx << ',' << row.n << ',' << row.estimator << ',' << format_double(row.error) << ','
            << row.samples_total << ',' << row.branch << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    write_csv(out, rows);
    if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

namespace {

template <typename T>
T parse_field(const std::string& text, std::size_t line_no) {
    T value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw std::runtime_error("read_csv: line " + std::to_string(line_no) + ": bad field '" + text + "'");
    }
    return value;
}

}  // namespace

std::vector<ResultRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_csv: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw std::runtime_error("read_csv: unexpected header '" + line + "'");

    std::vector<ResultRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream split(line);
        std::string field;
        while (std::getline(split, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        if (fields.size() != 6) {
            throw std::runtime_error("read_csv: line " + std::to_string(line_no) + ": expected 6 fields");
        }
        ResultRow row;
        row.run_idx = parse_field<std::int64_t>(fields[0], line_no);
        row.n = parse_field<std::int64_t>(fields[1], line_no);
        row.estimator = fields[2];
        row.error = parse_field<double>(fields[3], line_no);
        row.samples_total = parse_field<std::int64_t>(fields[4], line_no);
        row.branch = fields[5];
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
    return read_csv(in);
}

void sort_rows(std::vector<ResultRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.run_idx, a.n, a.estimator) < std::tie(b.run_idx, b.n, b.estimator);
    });
}

std::vector<SeriesPoint> aggregate(const std::vector<ResultRow>& rows) {
    std::map<std::pair<std::string, std::int64_t>, std::vector<double>> groups;
    for (const ResultRow& row : rows) groups[{row.estimator, row.n}].push_back(row.error);

    std::vector<SeriesPoint> points;
    for (const auto& [key, errors] : groups) {
        SeriesPoint p;
        p.estimator = key.first;
        p.n = key.second;
        p.count = static_cast<std::int64_t>(errors.size());
        double sum = 0.0;
        for (double e : errors) sum += e;
        p.mean = sum / static_cast<double>(errors.size());
        double sq = 0.0;
        for (double e : errors) sq += (e - p.mean) * (e - p.mean);
        p.std = std::sqrt(sq / static_cast<double>(errors.size()));
        points.push_back(std::move(p));
    }
    return points;
}

void write_series_csv(std::ostream& out, const std::vector<SeriesPoint>& points) {
    out << "estimator,n,mean,std,count\n";
    for (const SeriesPoint& p : points) {
        out << p.estimator << ',' << p.n << ',' << format_double(p.mean) << ',' << format_double(p.std) << ','
            << p.count << '\n';
    }
}

}  // namespace advgauss
