#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace levymix {

inline constexpr const char* kVersion = "levymix 0.1.0";

std::string format_double(double v);  // shortest round-trip via %.17g
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

// Collects the run outputs: CSV files with a mandatory header row, a schema
// file documenting every column, gnuplot command files on request, and a
// plain-text manifest with one digest line per output file.
class RunWriter {
 public:
  RunWriter(std::filesystem::path dir, std::string subcommand);

  class Csv {
   public:
    void row(const std::vector<std::string>& cells);
    ~Csv();

   private:
    friend class RunWriter;
    Csv(std::filesystem::path path, std::size_t n_cols, std::ofstream out);
    std::filesystem::path path_;
    std::size_t n_cols_;
    std::ofstream out_;
  };

  // columns: (name, documentation) pairs; the header row is written
  // immediately and the docs land in the schema file.
  Csv open_csv(const std::string& filename,
               const std::vector<std::pair<std::string, std::string>>& columns);

  void set_kv(const std::string& key, const std::string& value);
  void write_plot_script(const std::string& filename, const std::string& text);
  void write_text(const std::string& filename, const std::string& text);

  // Writes schema.txt and manifest.txt (config echo + key/values + digests).
  void finish(const std::string& config_echo);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::string subcommand_;
  std::vector<std::string> files_;
  std::vector<std::pair<std::string, std::string>> kvs_;
  std::string schema_;
  std::chrono::steady_clock::time_point started_;
  std::string wall_start_;
};

}  // namespace levymix
