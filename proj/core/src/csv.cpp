#include "dbf/csv.hpp"

#include <cstdio>
#include <stdexcept>

#include "dbf/version.hpp"

namespace dbf {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string csv_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, std::uint64_t config_hash,
                     const std::string& workload_source)
    : out_(path), path_(path) {
  if (!out_) throw std::runtime_error("cannot write " + path);
  comment(std::string(kToolName) + " " + std::string(kToolVersion));
  comment("config_hash: " + hex64(config_hash));
  comment("workload: " + workload_source);
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\n"; }

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << "\n";
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw std::runtime_error("failed writing " + path_);
}

}  // namespace dbf
