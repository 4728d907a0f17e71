#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "photonstore/adiabatic.hpp"
#include "photonstore/optimizer.hpp"

namespace photonstore {

/// PHOTONSTORE_CACHE_DIR if set, else $XDG_CACHE_HOME/photonstore, else ~/.cache/photonstore.
std::filesystem::path default_cache_dir();

/// Memo + disk cache for the discretized kernel eigenproblems.  Samples are stored at
/// round-trip precision, so a cached result is bit-identical to a fresh one.  Cached
/// OptimResult::shape interpolates the stored samples.
class ModeCache {
 public:
  /// nullopt keeps the in-process memo only.
  explicit ModeCache(std::optional<std::filesystem::path> dir = std::nullopt);

  OptimResult backward(double d, const OptimOptions& opt = {});
  OptimResult forward(double d, const OptimOptions& opt = {});
  OptimResult nondegenerate(double d, double dk, const OptimOptions& opt = {});
  DecaylessMode decayless(double d);

  const std::optional<std::filesystem::path>& dir() const { return dir_; }
  std::size_t disk_hits() const { return disk_hits_; }

 private:
  template <class F>
  OptimResult cached(const std::string& key, F&& compute);

  std::optional<std::filesystem::path> dir_;
  std::mutex mu_;
  std::map<std::string, OptimResult> memo_;
  std::map<std::string, DecaylessMode> decayless_memo_;
  std::atomic<std::size_t> disk_hits_{0};
};

}  // namespace photonstore
