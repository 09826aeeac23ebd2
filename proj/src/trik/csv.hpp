// SPDX-License-Identifier: Apache-2.0

#ifndef TRIK_CSV_HPP
#define TRIK_CSV_HPP

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace trik
{

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

void write_csv_header(std::ostream &os, const std::vector<std::string> &columns);
void write_csv_row(std::ostream &os, std::span<const double> values);

struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Numeric CSV with one header row. Throws InvalidArgument on ragged or non-numeric rows.
CsvTable read_csv(std::istream &is);

}  // namespace trik

#endif  // TRIK_CSV_HPP
