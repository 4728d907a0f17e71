#include "photonstore/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace photonstore::io {

namespace fs = std::filesystem;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void CsvTable::add(std::string name, RVec values) {
  if (!cols_.empty() && values.size() != rows())
    throw ValidationError("csv column '" + name + "' has " + std::to_string(values.size()) + " rows, expected " +
                          std::to_string(rows()));
  names_.push_back(std::move(name));
  cols_.push_back(std::move(values));
}

void CsvTable::add(const std::string& name, const CVec& values) {
  RVec re(values.size()), im(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    re[i] = values[i].real();
    im[i] = values[i].imag();
  }
  add(name + "_re", std::move(re));
  add(name + "_im", std::move(im));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (j) out += ',';
    out += names_[j];
  }
  out += '\n';
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      if (j) out += ',';
      out += format_number(cols_[j][i]);
    }
    out += '\n';
  }
  return out;
}

bool CsvData::has(const std::string& name) const {
  for (const auto& h : header)
    if (h == name) return true;
  return false;
}

const RVec& CsvData::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == name) return columns[j];
  throw ValidationError("csv: missing column '" + name + "'");
}

namespace {
std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) {
    if (t == "nan") return std::nan("");
    if (t == "inf") return INFINITY;
    if (t == "-inf") return -INFINITY;
    throw ValidationError(where + ": not a number: '" + t + "'");
  }
  return v;
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Uniform-grid check on the abscissa; returns its span.
double uniform_span(const RVec& x, const std::string& source) {
  if (x.size() < 2) throw ValidationError(source + ": need at least 2 rows");
  const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  if (!(h > 0.0)) throw ValidationError(source + ": abscissa must increase");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i] - (x.front() + h * static_cast<double>(i))) > 1e-9 * (std::abs(x.back()) + 1.0))
      throw ValidationError(source + ": abscissa must be uniform (row " + std::to_string(i + 2) + ")");
  if (std::abs(x.front()) > 1e-12) throw ValidationError(source + ": abscissa must start at 0");
  return x.back();
}

CVec complex_column(const CsvData& d, const std::string& name) {
  const RVec& re = d.column(name + "_re");
  const RVec im = d.has(name + "_im") ? d.column(name + "_im") : RVec(re.size(), 0.0);
  CVec v(re.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(re[i], im[i]);
  return v;
}
}  // namespace

CsvData parse_csv(const std::string& text, const std::string& source) {
  CsvData d;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    auto cells = split(line, ',');
    if (d.header.empty()) {
      for (auto& c : cells) d.header.push_back(trim(c));
      d.columns.resize(d.header.size());
      continue;
    }
    if (cells.size() != d.header.size())
      throw ValidationError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(d.header.size()) +
                            " fields, got " + std::to_string(cells.size()));
    for (std::size_t j = 0; j < cells.size(); ++j)
      d.columns[j].push_back(parse_double(cells[j], source + ":" + std::to_string(lineno)));
  }
  if (d.header.empty()) throw ValidationError(source + ": empty csv");
  return d;
}

CsvData read_csv(const fs::path& path) { return parse_csv(read_file(path), path.string()); }

FieldMode read_field(const fs::path& path) {
  const CsvData d = read_csv(path);
  const double T = uniform_span(d.column("t"), path.string());
  return FieldMode(complex_column(d, "E"), T);
}

SpinWave read_spin(const fs::path& path) {
  const CsvData d = read_csv(path);
  const double Z = uniform_span(d.column("z"), path.string());
  if (std::abs(Z - 1.0) > 1e-9) throw ValidationError(path.string() + ": spin wave must span z in [0, 1]");
  return SpinWave(complex_column(d, "S"));
}

ControlField read_control(const fs::path& path) {
  const CsvData d = read_csv(path);
  const double T = uniform_span(d.column("t"), path.string());
  return ControlField(complex_column(d, "Omega"), T);
}

CsvTable field_table(const FieldMode& e, const std::string& name) {
  CsvTable t;
  RVec ts(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) ts[i] = e.t(i);
  t.add("t", std::move(ts));
  t.add(name, e.samples());
  return t;
}

CsvTable spin_table(const SpinWave& s, const std::string& name) {
  CsvTable t;
  RVec zs(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) zs[k] = s.z(k);
  t.add("z", std::move(zs));
  t.add(name, s.samples());
  return t;
}

CsvTable control_table(const ControlField& c) {
  CsvTable t;
  RVec ts(c.size()), mag(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    ts[i] = c.t(i);
    mag[i] = std::abs(c[i]);
  }
  t.add("t", std::move(ts));
  t.add("Omega", c.samples());
  t.add("Omega_abs", std::move(mag));
  t.add("h", c.h_cum());
  return t;
}

void Summary::set(const std::string& key, double value) { set(key, format_number(value)); }
void Summary::set(const std::string& key, long long value) { set(key, std::to_string(value)); }
void Summary::set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }
void Summary::set(const std::string& key, const std::string& value) {
  for (auto& kv : items_)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  items_.emplace_back(key, value);
}

void Summary::merge(const Summary& other, const std::string& prefix) {
  for (const auto& [k, v] : other.items_) set(prefix + k, v);
}

const std::string* Summary::find(const std::string& key) const {
  for (const auto& kv : items_)
    if (kv.first == key) return &kv.second;
  return nullptr;
}

std::string Summary::str() const {
  std::string out;
  for (const auto& [k, v] : items_) out += k + "=" + v + "\n";
  return out;
}

Summary parse_summary(const std::string& text) {
  Summary s;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    s.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return s;
}

}  // namespace photonstore::io
