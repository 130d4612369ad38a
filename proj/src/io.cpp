#include "kinwall/io.hpp"

#include <cstdio>

namespace kinwall {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i)
    out_ << (i ? "," : "") << header[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << (i ? "," : "") << format_number(values[i]);
  out_ << "\n";
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i)
    out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

std::filesystem::path OutputDir::file(const std::string& name) {
  const auto p = root_ / name;
  written_.push_back(p);
  return p;
}

void OutputDir::write_json(const std::string& name, const ordered_json& j) {
  std::ofstream out(file(name), std::ios::binary);
  out << j.dump(2) << "\n";
}

void OutputDir::discard_all() {
  for (const auto& p : written_) {
    std::error_code ec;
    std::filesystem::remove(p, ec);
  }
  written_.clear();
}

void write_field_csv(const EmpiricalField& field,
                     const std::filesystem::path& path) {
  const int d = field.grid().spatial.dim();
  std::vector<std::string> header = {"cell"};
  const char* xs[3] = {"x0", "x1", "x2"};
  const char* vs[3] = {"v0", "v1", "v2"};
  for (int a = 0; a < d; ++a) header.push_back(xs[a]);
  for (int a = 0; a < d; ++a) header.push_back(vs[a]);
  header.push_back("overflow");
  header.push_back("count");
  CsvWriter csv(path, header);
  const int nv = field.grid().velocity.n_cells();
  for (int c = 0; c < field.grid().n_cells(); ++c) {
    if (field.counts()[c] == 0) continue;
    const int sc = c / nv, vc = c % nv;
    const Vec x = field.grid().spatial.center(sc);
    const Vec v = field.grid().velocity.center(vc);
    std::vector<double> cells = {static_cast<double>(c)};
    for (int a = 0; a < d; ++a) cells.push_back(x[a]);
    for (int a = 0; a < d; ++a) cells.push_back(v[a]);
    cells.push_back(vc == field.grid().velocity.overflow_cell() ? 1.0 : 0.0);
    cells.push_back(static_cast<double>(field.counts()[c]));
    csv.row(cells);
  }
}

ordered_json field_summary(const EmpiricalField& field) {
  ordered_json j;
  j["deposits"] = field.n_deposits();
  j["overflow_deposits"] = field.overflow_deposits();
  j["low_speed_deposits"] = field.deposit_stats.low_speed;
  j["weighted_norm_alpha"] = weighted_norm(field);
  j["wall_hits"] = field.flux_stats.hits;
  j["flux_events"] = field.flux_stats.hits;
  j["flux_momentum"] = field.flux_stats.abs_flux;
  return j;
}

bool files_identical(const std::filesystem::path& a,
                     const std::filesystem::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::string sa((std::istreambuf_iterator<char>(fa)),
                 std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(fb)),
                 std::istreambuf_iterator<char>());
  return sa == sb;
}

}  // namespace kinwall
