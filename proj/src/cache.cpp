#include "photonstore/cache.hpp"

#include <cstdlib>
#include <fstream>

#include "json.hpp"
#include "photonstore/io.hpp"

namespace photonstore {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr int kCacheVersion = 1;

std::string options_key(const OptimOptions& o) {
  return "nz" + std::to_string(o.nz) + "-r" + std::to_string(o.refine) + "-t" + io::format_number(o.tol) + "-m" +
         io::format_number(o.mode_tol) + "-i" + std::to_string(o.max_iter);
}

json to_json(const OptimResult& r) {
  json j;
  j["version"] = kCacheVersion;
  std::vector<double> re, im;
  for (const auto& x : r.mode.samples()) {
    re.push_back(x.real());
    im.push_back(x.imag());
  }
  j["re"] = re;
  j["im"] = im;
  j["eigenvalue"] = {r.eigenvalue.real(), r.eigenvalue.imag()};
  j["efficiency"] = r.efficiency;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["history"] = r.history;
  return j;
}

std::optional<OptimResult> from_json(const json& j) {
  if (!j.is_object() || j.value("version", 0) != kCacheVersion) return std::nullopt;
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != im.size() || re.size() < 2) return std::nullopt;
  CVec v(re.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(re[i], im[i]);
  OptimResult r;
  r.mode = SpinWave(std::move(v), true);
  const auto ev = j.at("eigenvalue").get<std::vector<double>>();
  r.eigenvalue = cplx(ev.at(0), ev.at(1));
  r.efficiency = j.at("efficiency").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.residual = j.at("residual").get<double>();
  r.history = j.at("history").get<RVec>();
  const SpinWave m = r.mode;
  r.shape = [m](double z) { return m.at(z); };
  return r;
}
}  // namespace

fs::path default_cache_dir() {
  if (const char* p = std::getenv("PHOTONSTORE_CACHE_DIR"); p && *p) return fs::path(p);
  if (const char* p = std::getenv("XDG_CACHE_HOME"); p && *p) return fs::path(p) / "photonstore";
  if (const char* p = std::getenv("HOME"); p && *p) return fs::path(p) / ".cache" / "photonstore";
  return fs::temp_directory_path() / "photonstore-cache";
}

ModeCache::ModeCache(std::optional<fs::path> dir) : dir_(std::move(dir)) {}

template <class F>
OptimResult ModeCache::cached(const std::string& key, F&& compute) {
  {
    std::lock_guard lock(mu_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  std::optional<OptimResult> r;
  const fs::path file = dir_ ? *dir_ / (key + ".json") : fs::path();
  if (dir_ && fs::exists(file)) {
    try {
      std::ifstream f(file);
      r = from_json(json::parse(f));
      if (r) ++disk_hits_;
    } catch (const std::exception&) {
      r.reset();  // unreadable entry: recompute and overwrite
    }
  }
  if (!r) {
    OptimResult fresh = compute();
    // keep the same representation as a disk hit
    r = from_json(to_json(fresh));
    if (dir_) {
      try {
        io::write_atomic(file, to_json(fresh).dump() + "\n");
      } catch (const std::exception&) {
        // read-only cache directory: the memo still works
      }
    }
  }
  std::lock_guard lock(mu_);
  return memo_.emplace(key, *r).first->second;
}

OptimResult ModeCache::backward(double d, const OptimOptions& opt) {
  return cached("backward-d" + io::format_number(d) + "-" + options_key(opt),
                [&] { return optimal_backward_mode(d, opt); });
}

OptimResult ModeCache::forward(double d, const OptimOptions& opt) {
  return cached("forward-d" + io::format_number(d) + "-" + options_key(opt),
                [&] { return optimal_forward_mode(d, opt); });
}

OptimResult ModeCache::nondegenerate(double d, double dk, const OptimOptions& opt) {
  return cached("nondegenerate-d" + io::format_number(d) + "-k" + io::format_number(dk) + "-" + options_key(opt),
                [&] { return optimal_nondegenerate_mode(d, dk, opt); });
}

DecaylessMode ModeCache::decayless(double d) {
  const std::string key = io::format_number(d);
  {
    std::lock_guard lock(mu_);
    if (auto it = decayless_memo_.find(key); it != decayless_memo_.end()) return it->second;
  }
  DecaylessMode m = optimal_decayless_mode(d);
  std::lock_guard lock(mu_);
  return decayless_memo_.emplace(key, std::move(m)).first->second;
}

}  // namespace photonstore
