#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kneecast/signal/butterworth.hpp"
#include "kneecast/signal/window.hpp"

namespace kneecast::signal {

enum class ChannelKind { emg, kinematic, force };

struct PreprocessConfig {
  WindowSpec window;
  double emg_highpass_hz = 20.0;
  double emg_lowpass_hz = 5.0;
  double kin_lowpass_hz = 6.0;  // also used for force channels
  int highpass_order = 2;
  int lowpass_order = 2;
  /// Carry filter state across hops instead of resetting at each window start.
  bool streaming = false;

  void validate() const;
};

/// Mean and standard deviation removed by standardization.
struct ChannelStats {
  double mean = 0.0;
  double std = 1.0;
};

struct PreprocessedWindow {
  std::vector<std::vector<double>> emg;     // n_emg x output_samples
  std::vector<double> kinematic;            // output_samples, empty when absent
  std::vector<std::vector<double>> forces;  // 0 or 2 x output_samples
  std::size_t end_index = 0;
  /// Statistics of the filtered knee angle (degrees) before standardization.
  ChannelStats kinematic_stats;
};

/// Floor on the standard deviation used as divisor.
inline constexpr double kStdFloor = 1e-8;

/// Filters one channel at the input rate. EMG: high-pass, absolute value,
/// low-pass. Kinematic/force: low-pass only. Filters are initialized at the
/// steady state of raw[0], so a constant channel passes through unchanged
/// (kinematic) or as exact zeros (EMG).
std::vector<double> condition_channel(std::span<const double> raw, ChannelKind kind,
                                      const PreprocessConfig& config);

/// In-place (x - mean) / max(std, kStdFloor). Returns the statistics used.
ChannelStats standardize(std::span<double> values);

/// Keeps samples factor-1, 2*factor-1, ... so the last kept sample is the newest.
std::vector<double> decimate(std::span<const double> values, std::size_t factor);

/// Decimates an already conditioned window and standardizes the result.
std::vector<double> finish_channel(std::span<const double> conditioned, const PreprocessConfig& config,
                                   ChannelStats* stats = nullptr);

/// Full per-window pipeline over `raw` (one row per channel, each exactly
/// window.input_samples() long). At most one kinematic channel is accepted.
PreprocessedWindow preprocess_window(std::span<const std::vector<double>> raw,
                                     std::span<const ChannelKind> kinds, const PreprocessConfig& config,
                                     std::size_t end_index = 0);

}  // namespace kneecast::signal
