#include "msvar/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace msvar {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace and CR
    std::size_t b = cell.find_first_not_of(" \t\r");
    std::size_t e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos
                        ? std::string()
                        : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

DatasetT ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("ingest_csv: empty file " + path);
  std::vector<std::string> header = split_line(line);
  if (header.empty()) throw std::runtime_error("ingest_csv: empty header");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> dates;
  bool has_dates = false;
  bool first_row = true;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (first_row) {
      double tmp;
      has_dates = !parse_double(cells[0], tmp);
      first_row = false;
    }
    if (cells.size() != header.size())
      throw std::runtime_error("ingest_csv: row " + std::to_string(lineno) +
                               " has " + std::to_string(cells.size()) +
                               " cells, expected " +
                               std::to_string(header.size()));
    const std::size_t offset = has_dates ? 1 : 0;
    if (has_dates) dates.push_back(cells[0]);
    std::vector<double> row(cells.size() - offset);
    for (std::size_t j = offset; j < cells.size(); ++j) {
      if (!parse_double(cells[j], row[j - offset]))
        throw std::runtime_error("ingest_csv: bad numeric cell at row " +
                                 std::to_string(lineno) + ", column \"" +
                                 header[j] + "\"");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("ingest_csv: no data rows");

  DatasetT data;
  const std::size_t offset = has_dates ? 1 : 0;
  const Eigen::Index d = static_cast<Eigen::Index>(header.size() - offset);
  data.y.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < d; ++j) data.y(i, j) = rows[i][j];
  data.labels.assign(header.begin() + offset, header.end());
  data.dates = std::move(dates);
  data.validate();
  return data;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

void write_dataset_csv(const std::string& path, const DatasetT& data) {
  std::ostringstream os;
  const bool has_dates = !data.dates.empty();
  if (has_dates) os << "date,";
  for (Eigen::Index j = 0; j < data.y.cols(); ++j) {
    if (j) os << ',';
    os << (j < static_cast<Eigen::Index>(data.labels.size())
               ? data.labels[j]
               : "y" + std::to_string(j + 1));
  }
  os << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    if (has_dates) os << data.dates[i] << ',';
    for (Eigen::Index j = 0; j < data.y.cols(); ++j) {
      if (j) os << ',';
      os << format_g17(data.y(i, j));
    }
    os << '\n';
  }
  write_text_file(path, os.str());
}

}  // namespace msvar
