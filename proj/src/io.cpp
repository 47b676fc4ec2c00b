#include "phconn/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phconn {

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace {

std::vector<double> parse_row(const std::string& line, const std::string& path, size_t line_no) {
    std::vector<double> row;
    std::stringstream stream(line);
    std::string cell;
    while (std::getline(stream, cell, ',')) {
        size_t consumed = 0;
        double value = 0.0;
        try {
            value = std::stod(cell, &consumed);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": cannot parse '" + cell + "' as a number");
        }
        while (consumed < cell.size() &&
               (cell[consumed] == ' ' || cell[consumed] == '\t' || cell[consumed] == '\r')) {
            ++consumed;
        }
        if (consumed != cell.size()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": trailing characters in '" + cell + "'");
        }
        if (!std::isfinite(value)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": non-finite value '" + cell + "'");
        }
        row.push_back(value);
    }
    return row;
}

}  // namespace

std::vector<std::vector<double>> read_csv_rows(const std::string& path, bool skip_header) {
    std::ifstream input(path);
    if (!input) {
        throw std::runtime_error("cannot open '" + path + "' for reading");
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    size_t line_no = 0;
    while (std::getline(input, line)) {
        ++line_no;
        if (skip_header && line_no == 1) {
            continue;
        }
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        rows.push_back(parse_row(line, path, line_no));
        if (rows.size() > 1 && rows.back().size() != rows.front().size()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": row has " + std::to_string(rows.back().size()) +
                                     " columns, expected " + std::to_string(rows.front().size()));
        }
    }
    return rows;
}

PointCloud read_cloud_csv(const std::string& path, Norm norm, bool skip_header) {
    PointCloud cloud;
    cloud.points = read_csv_rows(path, skip_header);
    cloud.norm = norm;
    if (cloud.points.empty()) {
        throw std::runtime_error("'" + path + "' contains no points");
    }
    cloud.validate();
    return cloud;
}

void write_csv_rows(const std::string& path, const std::vector<std::vector<double>>& rows) {
    std::ofstream output(path);
    if (!output) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c > 0) {
                output << ',';
            }
            output << format_double(row[c]);
        }
        output << '\n';
    }
}

LabeledDataset read_labeled_csv(const std::string& path, bool skip_header) {
    const auto rows = read_csv_rows(path, skip_header);
    if (rows.empty() || rows.front().size() < 2) {
        throw std::runtime_error("'" + path + "' must have at least one feature column and a label column");
    }
    LabeledDataset dataset;
    dataset.samples.reserve(rows.size());
    dataset.labels.reserve(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) {
        const double raw_label = rows[r].back();
        const int label = static_cast<int>(std::llround(raw_label));
        if (std::abs(raw_label - label) > 1e-9) {
            throw std::runtime_error(path + ": row " + std::to_string(r + 1) +
                                     " has non-integer label " + format_double(raw_label));
        }
        dataset.samples.emplace_back(rows[r].begin(), rows[r].end() - 1);
        dataset.labels.push_back(label);
    }
    return dataset;
}

std::vector<double> read_score_csv(const std::string& path, bool skip_header) {
    const auto rows = read_csv_rows(path, skip_header);
    std::vector<double> scores;
    scores.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != 1) {
            throw std::runtime_error("'" + path + "' must have exactly one score per line");
        }
        scores.push_back(row.front());
    }
    return scores;
}

}  // namespace phconn
