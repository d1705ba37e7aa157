#include "kneecast/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kneecast/error.hpp"
#include "kneecast/random.hpp"
#include "kneecast/signal/butterworth.hpp"

namespace kneecast::data {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEnvelopeFloor = 0.08;
constexpr double kSensorNoiseMv = 0.01;
constexpr double kForcePeakN = 30.0;
constexpr double kForceNoiseN = 0.5;
// Interaction forces lead the joint motion they produce.
constexpr double kThighLeadS = 0.08;
constexpr double kShankLeadS = 0.12;

double circular_distance(double a, double b) {
  double d = std::abs(a - b);
  return std::min(d, 1.0 - d);
}

}  // namespace

double SynthSpec::effective_jitter() const {
  if (jitter) return *jitter;
  return condition == Condition::abnormal ? 0.3 : 0.05;
}

void SynthSpec::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m, "synth"); };
  if (n_cycles < 1) fail("n_cycles must be >= 1");
  if (!(cycle_period_s >= 1.0 && cycle_period_s <= 1.5)) fail("cycle_period_s must lie in [1.0, 1.5]");
  const double j = effective_jitter();
  if (!(j >= 0.0 && j <= 0.9)) fail("jitter must lie in [0, 0.9]");
  if (!(envelope_width > 0.0 && envelope_width < 0.5)) fail("envelope_width must lie in (0, 0.5)");
  if (!(activation_variability >= 0.0 && activation_variability <= 1.0)) {
    fail("activation_variability must lie in [0, 1]");
  }
  if (!(activation_timing_jitter >= 0.0 && activation_timing_jitter <= 0.1)) {
    fail("activation_timing_jitter must lie in [0, 0.1]");
  }
  if (!(sample_rate_hz >= 600.0)) fail("sample_rate_hz must be >= 600 to carry 20-250 Hz EMG");
}

SynthOutput synthesize_subject_detailed(const SynthSpec& spec) {
  spec.validate();
  const double fs = spec.sample_rate_hz;
  const double jitter = spec.effective_jitter();
  Rng cycle_rng(derive_seed(spec.seed, "cycles"));

  // Per-cycle period and amplitude factors; one extra amplitude so the
  // last cycle can blend towards it.
  std::vector<std::size_t> lengths(static_cast<std::size_t>(spec.n_cycles));
  std::vector<double> amplitude(lengths.size() + 1);
  for (std::size_t c = 0; c < lengths.size(); ++c) {
    const double period = spec.cycle_period_s * (1.0 + 0.5 * jitter * cycle_rng.uniform(-1.0, 1.0));
    lengths[c] = static_cast<std::size_t>(std::lround(period * fs));
    amplitude[c] = 1.0 + jitter * cycle_rng.uniform(-1.0, 1.0);
  }
  amplitude.back() = 1.0 + jitter * cycle_rng.uniform(-1.0, 1.0);

  std::size_t n = 0;
  for (auto len : lengths) n += len;

  SynthOutput out;
  Recording& rec = out.recording;
  rec.sample_rate_hz = fs;
  rec.subject_id = spec.subject_id;
  rec.trial_id = spec.trial_id;
  rec.condition = spec.condition;
  rec.time_ms.resize(n);
  rec.knee_angle_deg.resize(n);
  out.phase.resize(n);
  std::vector<double> amp_t(n);
  std::vector<std::size_t> cycle_of(n);

  std::size_t i = 0;
  for (std::size_t c = 0; c < lengths.size(); ++c) {
    for (std::size_t s = 0; s < lengths[c]; ++s, ++i) {
      const double phi = static_cast<double>(s) / static_cast<double>(lengths[c]);
      const double blend = 0.5 * (1.0 - std::cos(std::numbers::pi * phi));
      const double a = amplitude[c] + (amplitude[c + 1] - amplitude[c]) * blend;
      out.phase[i] = phi;
      cycle_of[i] = c;
      amp_t[i] = a;
      rec.time_ms[i] = static_cast<double>(i) * 1000.0 / fs;
      rec.knee_angle_deg[i] =
          spec.a0 + a * (spec.a1 * std::sin(kTwoPi * phi) + spec.a2 * std::sin(2.0 * kTwoPi * phi + spec.psi));
    }
  }

  // EMG: band-limited carrier times activation envelope.
  const auto hp = signal::design_butterworth({signal::FilterKind::high_pass, 2, 20.0, fs});
  const auto lp = signal::design_butterworth({signal::FilterKind::low_pass, 4, 250.0, fs});
  for (std::size_t ch = 0; ch < 4; ++ch) {
    Rng burst_rng(derive_seed(spec.seed, std::string("burst") + std::string(kEmgLabels[ch])));
    std::vector<double> burst_gain(lengths.size()), burst_shift(lengths.size());
    for (std::size_t c = 0; c < lengths.size(); ++c) {
      burst_gain[c] = std::exp(spec.activation_variability * burst_rng.normal());
      burst_shift[c] = spec.activation_timing_jitter * burst_rng.normal();
    }
    Rng noise_rng(derive_seed(spec.seed, std::string("emg") + std::string(kEmgLabels[ch])));
    std::vector<double> white(n);
    for (auto& w : white) w = noise_rng.normal();
    auto carrier = signal::apply_filter(lp, signal::apply_filter(hp, white));
    double ss = 0.0;
    for (double v : carrier) ss += v * v;
    const double rms = std::sqrt(ss / static_cast<double>(n));
    const double inv_rms = rms > 0.0 ? 1.0 / rms : 0.0;

    auto& env = out.envelopes[ch];
    env.resize(n);
    auto& emg = rec.emg[ch];
    emg.resize(n);
    const double two_w2 = 2.0 * spec.envelope_width * spec.envelope_width;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t c = cycle_of[k];
      double centre = spec.emg_phase[ch] + burst_shift[c];
      centre -= std::floor(centre);
      const double d = circular_distance(out.phase[k], centre);
      env[k] = spec.emg_gain_mv[ch] * (kEnvelopeFloor + amp_t[k] * burst_gain[c] * std::exp(-d * d / two_w2));
      emg[k] = env[k] * carrier[k] * inv_rms + kSensorNoiseMv * noise_rng.normal();
    }
  }

  if (spec.include_forces) {
    // Knee angular velocity, smoothed causally, read ahead by the lead time.
    std::vector<double> velocity(n, 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
      velocity[k] = (rec.knee_angle_deg[k + 1] - rec.knee_angle_deg[k - 1]) * fs / 2.0;
    }
    if (n >= 2) {
      velocity.front() = velocity[std::min<std::size_t>(1, n - 1)];
      velocity.back() = velocity[n >= 2 ? n - 2 : 0];
    }
    const auto smooth = signal::design_butterworth({signal::FilterKind::low_pass, 2, 10.0, fs});
    const auto v = signal::apply_filter(smooth, velocity);
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    const double scale = peak > 0.0 ? kForcePeakN / peak : 0.0;

    Rng force_rng(derive_seed(spec.seed, "forces"));
    auto lead_of = [&](double lead_s) { return static_cast<std::size_t>(std::lround(lead_s * fs)); };
    const std::size_t thigh_lead = lead_of(kThighLeadS);
    const std::size_t shank_lead = lead_of(kShankLeadS);
    rec.force_thigh_n.emplace(n);
    rec.force_shank_n.emplace(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double vt = v[std::min(k + thigh_lead, n - 1)];
      const double vs = v[std::min(k + shank_lead, n - 1)];
      (*rec.force_thigh_n)[k] = scale * vt + kForceNoiseN * force_rng.normal();
      (*rec.force_shank_n)[k] = -scale * vs + kForceNoiseN * force_rng.normal();
    }
  }

  rec.validate();
  return out;
}

Recording synthesize_subject(const SynthSpec& spec) { return synthesize_subject_detailed(spec).recording; }

}  // namespace kneecast::data
