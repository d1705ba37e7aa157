#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "kneecast/data/synth.hpp"
#include "kneecast/random.hpp"

namespace testing {

// Small generator helpers for property tests. Each test seeds its own Rng so
// a failing case can be replayed from the printed seed.
struct Gen {
  kneecast::Rng rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double real(double lo, double hi) { return rng.uniform(lo, hi); }
  std::size_t index(std::size_t lo, std::size_t hi) { return lo + static_cast<std::size_t>(rng.below(hi - lo + 1)); }
  std::vector<double> reals(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = real(lo, hi);
    return v;
  }
  std::vector<double> normals(std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * rng.normal();
    return v;
  }
};

// Fraction of signal power above `cut_hz`: Hann-windowed DFT periodogram
// after removing the mean. Without the taper the jump between the last and
// first sample leaks into every bin.
inline double power_fraction_above(const std::vector<double>& x, double fs, double cut_hz) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> taper(n);
  for (std::size_t t = 0; t < n; ++t) taper[t] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(t) / static_cast<double>(n));
  double total = 0.0, above = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    const double w = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t t = 0; t < n; ++t) acc += (x[t] - mean) * taper[t] * std::polar(1.0, w * static_cast<double>(t));
    const double p = std::norm(acc);
    total += p;
    if (static_cast<double>(k) * fs / static_cast<double>(n) > cut_hz) above += p;
  }
  return total > 0.0 ? above / total : 0.0;
}

inline kneecast::data::SynthSpec small_subject(std::uint64_t seed, int cycles = 6, bool forces = true) {
  kneecast::data::SynthSpec s;
  s.n_cycles = cycles;
  s.seed = seed;
  s.include_forces = forces;
  s.subject_id = "s" + std::to_string(seed);
  return s;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("kneecast_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

}  // namespace testing
