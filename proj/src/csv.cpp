#include "modereg/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

#include "modereg/errors.hpp"

namespace modereg {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    std::string f = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto b = f.find_first_not_of(" \t\r\"");
    const auto e = f.find_last_not_of(" \t\r\"");
    out.push_back(b == std::string::npos ? std::string() : f.substr(b, e - b + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

namespace {

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

// Rows count data lines after the header from 1; the file line is given too.
[[noreturn]] void row_error(std::size_t row, std::size_t line, const std::string& what) {
  throw DataError("row " + std::to_string(row) + " (line " + std::to_string(line) + "): " + what);
}

double parse_field(const std::string& f, const char* name, std::size_t row, std::size_t line) {
  if (f.empty()) row_error(row, line, std::string("missing value for ") + name);
  double v = 0.0;
  const char* first = f.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size())
    row_error(row, line, std::string("cannot parse ") + name + " value '" + f + "'");
  if (!std::isfinite(v)) row_error(row, line, std::string("non-finite ") + name + " value");
  return v;
}

}  // namespace

Dataset read_wy_csv(std::istream& in, std::vector<std::string>* warnings) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank(line) && line.rfind('#', 0) != 0) break;
  }
  if (line_no == 0 || blank(line)) throw DataError("input CSV has no header line");
  const auto header = split_csv_line(line);
  int iw = -1, iy = -1;
  for (std::size_t k = 0; k < header.size(); ++k) {
    std::string h = header[k];
    for (auto& c : h) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (h == "w") {
      iw = static_cast<int>(k);
    } else if (h == "y") {
      iy = static_cast<int>(k);
    } else if (warnings) {
      warnings->push_back(h == "x" ? "column 'x' is ignored: estimators only use w and y"
                                   : "column '" + header[k] + "' is ignored");
    }
  }
  if (iw < 0 || iy < 0) throw DataError("input CSV header must name columns w and y");

  std::vector<double> w, y;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    ++row;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      row_error(row, line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                  std::to_string(fields.size()));
    w.push_back(parse_field(fields[static_cast<std::size_t>(iw)], "w", row, line_no));
    y.push_back(parse_field(fields[static_cast<std::size_t>(iy)], "y", row, line_no));
  }
  if (w.empty()) throw DataError("input CSV has no data rows");
  return Dataset(std::move(w), std::move(y));
}

Dataset read_wy_csv_file(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return read_wy_csv(in, warnings);
}

}  // namespace modereg
