#include "kneecast/signal/butterworth.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kneecast/error.hpp"

namespace kneecast::signal {

void FilterSpec::validate() const {
  std::ostringstream msg;
  if (order < 1 || order > 8) {
    msg << "filter order must be in 1..8, got " << order;
    throw ConfigError(msg.str(), "invalid_spec");
  }
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    msg << "sample rate must be positive, got " << sample_rate_hz;
    throw ConfigError(msg.str(), "invalid_spec");
  }
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0)) {
    msg << "cutoff " << cutoff_hz << " Hz outside (0, " << sample_rate_hz / 2.0 << ") Hz";
    throw ConfigError(msg.str(), "invalid_spec");
  }
}

bool Biquad::stable() const {
  // Jury conditions for z^2 + a1 z + a2.
  return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2;
}

BiquadCascade::BiquadCascade(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

void BiquadCascade::reset() {
  for (auto& s : sections_) s.z1 = s.z2 = 0.0;
}

double BiquadCascade::step(double x) {
  for (auto& s : sections_) x = s.step(x);
  return x;
}

std::vector<double> BiquadCascade::process(std::span<const double> samples) {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = step(samples[i]);
  return out;
}

std::complex<double> BiquadCascade::response(double freq_hz, double fs_hz) const {
  const double w = 2.0 * std::numbers::pi * freq_hz / fs_hz;
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h{1.0, 0.0};
  for (const auto& s : sections_) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return h;
}

namespace {

// Bilinear map of (n2 s^2 + n1 s + n0) / (d2 s^2 + d1 s + d0) with s = k (1 - z^-1)/(1 + z^-1).
Biquad bilinear(double n2, double n1, double n0, double d2, double d1, double d0, double k) {
  const double kk = k * k;
  const double a0 = d2 * kk + d1 * k + d0;
  Biquad q;
  q.b0 = (n2 * kk + n1 * k + n0) / a0;
  q.b1 = (2.0 * n0 - 2.0 * n2 * kk) / a0;
  q.b2 = (n2 * kk - n1 * k + n0) / a0;
  q.a1 = (2.0 * d0 - 2.0 * d2 * kk) / a0;
  q.a2 = (d2 * kk - d1 * k + d0) / a0;
  return q;
}

// First-order map of (n1 s + n0) / (d1 s + d0).
Biquad bilinear_first(double n1, double n0, double d1, double d0, double k) {
  const double a0 = d1 * k + d0;
  Biquad q;
  q.b0 = (n1 * k + n0) / a0;
  q.b1 = (n0 - n1 * k) / a0;
  q.a1 = (d0 - d1 * k) / a0;
  return q;
}

}  // namespace

BiquadCascade design_butterworth(const FilterSpec& spec) {
  spec.validate();
  const double fs = spec.sample_rate_hz;
  const double k = 2.0 * fs;
  const double wc = k * std::tan(std::numbers::pi * spec.cutoff_hz / fs);
  const int n = spec.order;
  const bool low = spec.kind == FilterKind::low_pass;

  std::vector<Biquad> sections;
  // Prototype poles p_m = exp(i*pi*(2m + n + 1) / (2n)); take the upper-half
  // representatives of each conjugate pair.
  for (int m = 0; m < n / 2; ++m) {
    const double theta = std::numbers::pi * (2.0 * m + n + 1) / (2.0 * n);
    const double re = std::cos(theta);  // negative
    // Section denominator s^2 - 2 re wc s + wc^2.
    if (low) {
      sections.push_back(bilinear(0.0, 0.0, wc * wc, 1.0, -2.0 * re * wc, wc * wc, k));
    } else {
      sections.push_back(bilinear(1.0, 0.0, 0.0, 1.0, -2.0 * re * wc, wc * wc, k));
    }
  }
  if (n % 2 == 1) {
    // Real pole at -wc.
    if (low) {
      sections.push_back(bilinear_first(0.0, wc, 1.0, wc, k));
    } else {
      sections.push_back(bilinear_first(1.0, 0.0, 1.0, wc, k));
    }
  }
  for (const auto& s : sections) {
    if (!s.stable()) throw NumericError("designed Butterworth section is unstable", "invalid_spec");
  }
  return BiquadCascade(std::move(sections));
}

std::vector<double> apply_filter(const BiquadCascade& cascade, std::span<const double> samples) {
  BiquadCascade local = cascade;
  local.reset();
  return local.process(samples);
}

}  // namespace kneecast::signal
