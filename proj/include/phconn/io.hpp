#pragma once

#include <string>
#include <vector>

#include "phconn/geometry.hpp"

namespace phconn {

/// Shortest representation that round-trips a double exactly ("%.17g").
std::string format_double(double value);

/// CSV rows of decimal floating point values, one point per row, no header
/// unless skip_header asks to drop the first line.
std::vector<std::vector<double>> read_csv_rows(const std::string& path, bool skip_header = false);

PointCloud read_cloud_csv(const std::string& path, Norm norm, bool skip_header = false);

void write_csv_rows(const std::string& path, const std::vector<std::vector<double>>& rows);

/// Last column holds an integer class label; remaining columns are the sample.
struct LabeledDataset {
    std::vector<std::vector<double>> samples;
    std::vector<int> labels;
};

LabeledDataset read_labeled_csv(const std::string& path, bool skip_header = false);

/// One score per line (a single-column CSV).
std::vector<double> read_score_csv(const std::string& path, bool skip_header = false);

}  // namespace phconn
