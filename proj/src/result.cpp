#include "siq/result.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace siq {

std::string format_csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

ExperimentResult::ExperimentResult(std::string protocol, std::vector<SweepSpec> axes)
    : protocol_(std::move(protocol)), axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > 2) throw std::invalid_argument("ExperimentResult: need one or two axes");
    for (const auto &a : axes_) {
        if (a.values.empty()) throw std::invalid_argument("ExperimentResult: axis '" + a.axis_name + "' is empty");
    }
    meta_["protocol"] = protocol_;
    meta_["warnings"] = nlohmann::json::array();
}

std::size_t ExperimentResult::n_points() const {
    std::size_t n = 1;
    for (const auto &a : axes_) n *= a.values.size();
    return n;
}

void ExperimentResult::add_column(std::string name, std::string unit, std::vector<double> values, bool probability) {
    if (values.size() != n_points()) {
        throw std::invalid_argument("column '" + name + "' has " + std::to_string(values.size()) +
                                    " values, expected " + std::to_string(n_points()));
    }
    if (probability) {
        for (auto &v : values) {
            if (!(v >= -1e-9 && v <= 1 + 1e-9)) {
                throw std::invalid_argument("column '" + name + "' holds a probability outside [0, 1]");
            }
            v = std::clamp(v, 0.0, 1.0);
        }
    }
    columns_.push_back({std::move(name), std::move(unit), probability, std::move(values)});
}

const DataColumn &ExperimentResult::column(const std::string &name) const {
    for (const auto &c : columns_) {
        if (c.name == name) return c;
    }
    throw std::out_of_range("no column '" + name + "'");
}

double ExperimentResult::at(const std::string &name, std::size_t i, std::size_t j) const {
    const std::size_t inner = axes_.size() == 2 ? axes_[1].values.size() : 1;
    return column(name).values.at(i * inner + j);
}

void ExperimentResult::add_warning(const std::string &w) {
    auto &arr = meta_["warnings"];
    for (const auto &e : arr) {
        if (e == w) return;
    }
    arr.push_back(w);
}

std::vector<std::string> ExperimentResult::warnings() const {
    std::vector<std::string> out;
    if (meta_.contains("warnings")) {
        for (const auto &e : meta_["warnings"]) out.push_back(e.get<std::string>());
    }
    return out;
}

std::string ExperimentResult::to_csv() const {
    auto label = [](const std::string &name, const std::string &unit) {
        return unit.empty() ? name : name + " [" + unit + "]";
    };
    std::ostringstream out;
    bool first = true;
    for (const auto &a : axes_) {
        out << (first ? "" : ",") << label(a.axis_name, a.unit);
        first = false;
    }
    for (const auto &c : columns_) out << "," << label(c.name, c.unit);
    out << "\n";
    const std::size_t inner = axes_.size() == 2 ? axes_[1].values.size() : 1;
    for (std::size_t k = 0; k < n_points(); ++k) {
        out << format_csv_number(axes_[0].values[k / inner]);
        if (axes_.size() == 2) out << "," << format_csv_number(axes_[1].values[k % inner]);
        for (const auto &c : columns_) out << "," << format_csv_number(c.values[k]);
        out << "\n";
    }
    return out.str();
}

void ExperimentResult::write(const std::string &dir, const std::string &name) const {
    std::filesystem::create_directories(dir);
    const auto base = std::filesystem::path(dir) / name;
    auto put = [](const std::filesystem::path &path, const std::string &text) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
        f << text;
    };
    put(base.string() + ".csv", to_csv());
    put(base.string() + ".meta.json", metadata_json());
}

}  // namespace siq
