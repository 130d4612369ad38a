#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kinwall/field.hpp"

namespace kinwall {

using ordered_json = nlohmann::ordered_json;

std::string format_number(double v);  // '.' separator, stable %.12g

// CSV: comma separated, header row, '.' decimals, LF endings.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
};

// Collects written paths so partial outputs can be removed on failure.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);
  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path file(const std::string& name);
  void write_json(const std::string& name, const ordered_json& j);
  void discard_all();

 private:
  std::filesystem::path root_;
  std::vector<std::filesystem::path> written_;
};

void write_field_csv(const EmpiricalField& field,
                     const std::filesystem::path& path);

ordered_json field_summary(const EmpiricalField& field);

bool files_identical(const std::filesystem::path& a,
                     const std::filesystem::path& b);

}  // namespace kinwall
