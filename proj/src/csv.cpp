#include "abcms/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "abcms/errors.hpp"

namespace abcms {

std::string fmt_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const CsvTable& t) {
    std::ofstream out(path);
    if (!out) throw numeric_error("cannot open for writing: " + path);
    for (std::size_t j = 0; j < t.header.size(); ++j) {
        if (j) out << ',';
        out << t.header[j];
    }
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            out << row[j];
        }
        out << '\n';
    }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw numeric_error("cannot open for reading: " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw numeric_error("empty csv: " + path);
    t.header = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        t.rows.push_back(split_line(line));
    }
    return t;
}

void write_reference_table(const std::string& path, const ReferenceTable& t,
                           const DistanceVec* dist) {
    CsvTable csv;
    csv.header.push_back("idx");
    for (int j = 1; j <= t.k_theta; ++j)
        csv.header.push_back("theta_" + std::to_string(j));
    for (int j = 1; j <= t.k_eta; ++j)
        csv.header.push_back("eta_" + std::to_string(j));
    if (dist) csv.header.push_back("dist");
    csv.rows.reserve(t.rows());
    for (std::size_t i = 0; i < t.rows(); ++i) {
        std::vector<std::string> row;
        row.reserve(csv.header.size());
        row.push_back(std::to_string(i));
        for (double v : t.theta_row(i)) row.push_back(fmt_double(v));
        for (double v : t.eta_row(i)) row.push_back(fmt_double(v));
        if (dist) row.push_back(fmt_double(dist->d[i]));
        csv.rows.push_back(std::move(row));
    }
    write_csv(path, csv);
}

ReferenceTable read_reference_table(const std::string& path,
                                    std::vector<double>* dist) {
    const CsvTable csv = read_csv(path);
    ReferenceTable t;
    bool has_dist = !csv.header.empty() && csv.header.back() == "dist";
    int kt = 0, ke = 0;
    for (const auto& h : csv.header) {
        if (h.rfind("theta_", 0) == 0) ++kt;
        if (h.rfind("eta_", 0) == 0) ++ke;
    }
    if (kt == 0 || ke == 0)
        throw numeric_error("reference table csv missing theta/eta columns");
    t.k_theta = kt;
    t.k_eta = ke;
    if (dist) dist->clear();
    for (const auto& row : csv.rows) {
        std::size_t col = 1;
        for (int j = 0; j < kt; ++j) t.theta.push_back(std::stod(row.at(col++)));
        for (int j = 0; j < ke; ++j) t.eta.push_back(std::stod(row.at(col++)));
        if (has_dist && dist) dist->push_back(std::stod(row.at(col)));
    }
    return t;
}

void write_dataset(const std::string& path, const std::vector<double>& y) {
    CsvTable csv;
    csv.header = {"y"};
    csv.rows.reserve(y.size());
    for (double v : y) csv.rows.push_back({fmt_double(v)});
    write_csv(path, csv);
}

} // namespace abcms
