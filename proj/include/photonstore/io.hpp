#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "photonstore/model.hpp"

namespace photonstore::io {

/// Shortest decimal that reads back to the same double ("nan", "inf", "-inf" otherwise).
std::string format_number(double x);

/// Writes through a temporary sibling and renames, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Column-oriented CSV with a header row; complex columns become name_re, name_im.
class CsvTable {
 public:
  void add(std::string name, RVec values);
  void add(const std::string& name, const CVec& values);
  std::size_t rows() const { return cols_.empty() ? 0 : cols_.front().size(); }
  std::size_t columns() const { return cols_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const { write_atomic(path, str()); }

 private:
  std::vector<std::string> names_;
  std::vector<RVec> cols_;
};

struct CsvData {
  std::vector<std::string> header;
  std::vector<RVec> columns;
  bool has(const std::string& name) const;
  const RVec& column(const std::string& name) const;
};

CsvData parse_csv(const std::string& text, const std::string& source = "<csv>");
CsvData read_csv(const std::filesystem::path& path);

/// key=value sidecar, in insertion order.
class Summary {
 public:
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, int value) { set(key, static_cast<long long>(value)); }
  void set(const std::string& key, std::size_t value) { set(key, static_cast<long long>(value)); }
  void set(const std::string& key, bool value);
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void merge(const Summary& other, const std::string& prefix = "");
  const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }
  const std::string* find(const std::string& key) const;
  std::string str() const;
  void write(const std::filesystem::path& path) const { write_atomic(path, str()); }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

Summary parse_summary(const std::string& text);

// Mode files: uniform first column (t or z) plus <name>_re/<name>_im.
FieldMode read_field(const std::filesystem::path& path);      // t, E_re, E_im
SpinWave read_spin(const std::filesystem::path& path);        // z, S_re, S_im on [0,1]
ControlField read_control(const std::filesystem::path& path); // t, Omega_re, Omega_im

CsvTable field_table(const FieldMode& e, const std::string& name = "E");
CsvTable spin_table(const SpinWave& s, const std::string& name = "S");
CsvTable control_table(const ControlField& c);

}  // namespace photonstore::io
