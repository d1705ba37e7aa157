#pragma once

#include <complex>
#include <span>
#include <vector>

namespace kneecast::signal {

enum class FilterKind { high_pass, low_pass };

struct FilterSpec {
  FilterKind kind = FilterKind::low_pass;
  int order = 2;
  double cutoff_hz = 5.0;
  double sample_rate_hz = 1000.0;

  /// Throws ConfigError("invalid_spec") unless 0 < cutoff < fs/2 and order in 1..8.
  void validate() const;
};

/// One second-order section, a0 normalized to 1. First-order sections carry
/// b2 = a2 = 0. Runs in transposed direct form II.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
  double z1 = 0.0, z2 = 0.0;

  double step(double x) {
    const double y = b0 * x + z1;
    z1 = b1 * x - a1 * y + z2;
    z2 = b2 * x - a2 * y;
    return y;
  }
  bool stable() const;
};

class BiquadCascade {
 public:
  BiquadCascade() = default;
  explicit BiquadCascade(std::vector<Biquad> sections);

  /// Zeroes every delay register.
  void reset();
  double step(double x);
  /// Filters in place of the current state; output[i] uses samples[0..i] only.
  std::vector<double> process(std::span<const double> samples);

  /// Complex frequency response at `freq_hz` for sample rate `fs_hz`.
  std::complex<double> response(double freq_hz, double fs_hz) const;
  double gain(double freq_hz, double fs_hz) const { return std::abs(response(freq_hz, fs_hz)); }

  const std::vector<Biquad>& sections() const { return sections_; }

 private:
  std::vector<Biquad> sections_;
};

/// Digital Butterworth design: analog prototype, frequency pre-warping, then
/// the bilinear transform, one section per conjugate pole pair.
BiquadCascade design_butterworth(const FilterSpec& spec);

/// Pure filtering: copies the cascade, zeroes its state, filters `samples`.
std::vector<double> apply_filter(const BiquadCascade& cascade, std::span<const double> samples);

}  // namespace kneecast::signal
