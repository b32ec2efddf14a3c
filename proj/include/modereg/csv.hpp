#pragma once

#include <istream>
#include <string>
#include <vector>

#include "modereg/dataset.hpp"

namespace modereg {

//! Reads a headed CSV with columns `w` and `y` (any order). A column named
//! `x` and any other extra columns are ignored with a warning. Throws
//! DataError naming the row of the first malformed or non-finite entry.
Dataset read_wy_csv(std::istream& in, std::vector<std::string>* warnings = nullptr);
Dataset read_wy_csv_file(const std::string& path, std::vector<std::string>* warnings = nullptr);

//! Splits one CSV line on commas, trimming blanks around each field.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace modereg
