// SPDX-License-Identifier: Apache-2.0

#include "trik/csv.hpp"

#include <charconv>
#include <sstream>

#include "trik/error.hpp"

namespace trik
{

std::string format_double(double v)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream &os, const std::vector<std::string> &columns)
{
  for (std::size_t i = 0; i < columns.size(); ++i)
  {
    os << (i ? "," : "") << columns[i];
  }
  os << '\n';
}

void write_csv_row(std::ostream &os, std::span<const double> values)
{
  for (std::size_t i = 0; i < values.size(); ++i)
  {
    os << (i ? "," : "") << format_double(values[i]);
  }
  os << '\n';
}

CsvTable read_csv(std::istream &is)
{
  CsvTable table;
  std::string line;
  if (!std::getline(is, line))
  {
    throw Error(ErrorKind::InvalidArgument, "csv: missing header row");
  }
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
    {
      table.header.push_back(cell);
    }
  }
  std::size_t line_no = 1;
  while (std::getline(is, line))
  {
    ++line_no;
    if (line.empty())
    {
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size())
    {
      std::size_t end = line.find(',', start);
      if (end == std::string::npos)
      {
        end = line.size();
      }
      double v = 0.0;
      auto res = std::from_chars(line.data() + start, line.data() + end, v);
      if (res.ec != std::errc() || res.ptr != line.data() + end)
      {
        throw Error(ErrorKind::InvalidArgument,
                    "csv: non-numeric cell on line " + std::to_string(line_no));
      }
      row.push_back(v);
      start = end + 1;
    }
    if (row.size() != table.header.size())
    {
      throw Error(ErrorKind::InvalidArgument,
                  "csv: wrong number of cells on line " + std::to_string(line_no));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace trik
