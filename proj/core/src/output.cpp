#include "levymix/output.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace levymix {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("fnv1a64_file: cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

RunWriter::RunWriter(std::filesystem::path dir, std::string subcommand)
    : dir_(std::move(dir)), subcommand_(std::move(subcommand)) {
  std::filesystem::create_directories(dir_);
  started_ = std::chrono::steady_clock::now();
  const std::time_t now = std::time(nullptr);
  char buf[64];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  wall_start_ = buf;
}

RunWriter::Csv::Csv(std::filesystem::path path, std::size_t n_cols, std::ofstream out)
    : path_(std::move(path)), n_cols_(n_cols), out_(std::move(out)) {}

RunWriter::Csv::~Csv() = default;

void RunWriter::Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != n_cols_)
    throw std::logic_error("csv row width mismatch in " + path_.string());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

RunWriter::Csv RunWriter::open_csv(
    const std::string& filename,
    const std::vector<std::pair<std::string, std::string>>& columns) {
  const std::filesystem::path path = dir_ / filename;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output " + path.string());
  schema_ += "file " + filename + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out << ',';
    out << columns[i].first;
    schema_ += "  " + columns[i].first + ": " + columns[i].second + "\n";
  }
  out << '\n';
  files_.push_back(filename);
  return Csv(path, columns.size(), std::move(out));
}

void RunWriter::set_kv(const std::string& key, const std::string& value) {
  kvs_.emplace_back(key, value);
}

void RunWriter::write_plot_script(const std::string& filename, const std::string& text) {
  write_text(filename, text);
}

void RunWriter::write_text(const std::string& filename, const std::string& text) {
  const std::filesystem::path path = dir_ / filename;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output " + path.string());
  out << text;
  out.close();
  files_.push_back(filename);
}

void RunWriter::finish(const std::string& config_echo) {
  write_text("schema.txt", schema_);

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  std::string m;
  m += "levymix run manifest\n";
  m += std::string("version = ") + kVersion + "\n";
  m += "subcommand = " + subcommand_ + "\n";
  for (const auto& [k, v] : kvs_) m += k + " = " + v + "\n";
  m += "wall_clock_start = " + wall_start_ + "\n";
  m += "wall_clock_seconds = " + format_double(secs) + "\n";
  m += "[config]\n";
  m += config_echo;
  m += "[outputs]\n";
  for (const std::string& f : files_) {
    const std::filesystem::path p = dir_ / f;
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(p)));
    m += f + " bytes=" + std::to_string(std::filesystem::file_size(p)) + " fnv1a64=" + hex + "\n";
  }
  std::ofstream out(dir_ / "manifest.txt", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest");
  out << m;
}

}  // namespace levymix
