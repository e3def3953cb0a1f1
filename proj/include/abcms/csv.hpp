#pragma once

#include <string>
#include <vector>

#include "abcms/reference_table.hpp"

namespace abcms {

// Shortest decimal form that round-trips a double (up to 17 significant
// digits), so CSVs replay bit-exactly.
std::string fmt_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string& path, const CsvTable& t);
CsvTable read_csv(const std::string& path);

// Reference-table round trip: columns idx,theta_1..k,eta_1..m and an
// optional dist column.
void write_reference_table(const std::string& path, const ReferenceTable& t,
                           const DistanceVec* dist = nullptr);
ReferenceTable read_reference_table(const std::string& path,
                                    std::vector<double>* dist = nullptr);

// Single-column dataset export, header "y".
void write_dataset(const std::string& path, const std::vector<double>& y);

} // namespace abcms
