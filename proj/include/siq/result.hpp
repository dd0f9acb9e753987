#pragma once

// Labeled sweep data shared by all experiment drivers, with CSV and JSON
// sidecar serialization.

#include <json.hpp>

#include <string>
#include <vector>

namespace siq {

struct SweepSpec {
    std::string axis_name;
    std::string unit;
    std::vector<double> values;
    int repeat = 1;
};

struct DataColumn {
    std::string name;
    std::string unit;  // empty for dimensionless
    bool probability = false;
    std::vector<double> values;
};

class ExperimentResult {
  public:
    ExperimentResult() = default;
    /// One or two axes; data are stored row-major with the first axis outermost.
    ExperimentResult(std::string protocol, std::vector<SweepSpec> axes);

    const std::string &protocol() const { return protocol_; }
    const std::vector<SweepSpec> &axes() const { return axes_; }
    const std::vector<DataColumn> &columns() const { return columns_; }
    std::size_t n_points() const;

    /// Values flagged as probabilities must lie in [0, 1]; rounding excursions
    /// up to 1e-9 are clamped, anything larger throws std::invalid_argument.
    void add_column(std::string name, std::string unit, std::vector<double> values, bool probability);
    const DataColumn &column(const std::string &name) const;
    /// Value at (i) or (i, j) of a column.
    double at(const std::string &name, std::size_t i, std::size_t j = 0) const;

    nlohmann::json &metadata() { return meta_; }
    const nlohmann::json &metadata() const { return meta_; }
    void set_summary(const std::string &key, double value) { meta_["summary"][key] = value; }
    double summary(const std::string &key) const { return meta_.at("summary").at(key).get<double>(); }
    void add_warning(const std::string &w);
    std::vector<std::string> warnings() const;

    /// Header names every axis and column with its unit in brackets.
    std::string to_csv() const;
    std::string metadata_json() const { return meta_.dump(2) + "\n"; }
    /// Writes <dir>/<name>.csv and <dir>/<name>.meta.json.
    void write(const std::string &dir, const std::string &name) const;

  private:
    std::string protocol_;
    std::vector<SweepSpec> axes_;
    std::vector<DataColumn> columns_;
    nlohmann::json meta_ = nlohmann::json::object();
};

/// Fixed-precision formatting used for every CSV cell.
std::string format_csv_number(double v);

}  // namespace siq
