#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace dbf {

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

// Compact decimal formatting for CSV cells; stable across runs.
std::string csv_number(double value);

/* Comment-first CSV writer. Every file starts with '#' comment lines
   (provenance: tool version, config hash, workload source), then one header
   row, then data rows. Data rows are pure functions of config and seed;
   anything wall-clock flavored belongs in comments. */
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::uint64_t config_hash,
            const std::string& workload_source);

  void comment(const std::string& text);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  void close();

 private:
  std::ofstream out_;
  std::string path_;
};

}  // namespace dbf
