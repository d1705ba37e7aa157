#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kneecast/data/recording.hpp"

namespace kneecast::data {

/// Seeded gait-like recording generator. Knee angle follows
/// a0 + A(t) * (a1 sin(2 pi phi) + a2 sin(4 pi phi + psi)); each EMG channel is
/// 20-250 Hz noise modulated by a Gaussian activation envelope locked to the
/// gait phase phi.
struct SynthSpec {
  int n_cycles = 40;
  double cycle_period_s = 1.2;
  Condition condition = Condition::normal;
  /// Fractional per-cycle amplitude/period perturbation. Unset: 0.05 for
  /// normal, 0.3 for abnormal.
  std::optional<double> jitter;
  std::uint64_t seed = 0;
  bool include_forces = false;

  // Subject traits.
  double a0 = 30.0;
  double a1 = 25.0;
  double a2 = 10.0;
  double psi = 0.8;
  std::array<double, 4> emg_gain_mv{0.5, 0.5, 0.5, 0.5};
  std::array<double, 4> emg_phase{0.05, 0.30, 0.55, 0.80};
  double envelope_width = 0.08;  // Gaussian sigma in cycle-phase units
  /// Per-cycle log-normal sigma of each muscle's burst amplitude, drawn
  /// independently of the knee-angle amplitude.
  double activation_variability = 0.3;
  /// Per-cycle standard deviation of each burst's phase, in cycle units.
  double activation_timing_jitter = 0.03;
  double sample_rate_hz = 1000.0;

  std::string subject_id = "synth";
  std::string trial_id = "1";

  double effective_jitter() const;
  void validate() const;
};

struct SynthOutput {
  Recording recording;
  /// Noise-free activation envelope (mV) per EMG channel.
  std::array<std::vector<double>, 4> envelopes;
  /// Gait phase in [0, 1) per sample.
  std::vector<double> phase;
};

SynthOutput synthesize_subject_detailed(const SynthSpec& spec);
Recording synthesize_subject(const SynthSpec& spec);

}  // namespace kneecast::data
