#include "kneecast/signal/preprocess.hpp"

#include <cmath>
#include <sstream>

#include "kneecast/error.hpp"

namespace kneecast::signal {

void PreprocessConfig::validate() const {
  window.validate();
  auto check_lowpass = [](double hz, const char* name) {
    if (!(hz >= 3.0 && hz <= 6.0)) {
      std::ostringstream m;
      m << name << " must lie in [3, 6] Hz, got " << hz;
      throw ConfigError(m.str(), "invalid_spec");
    }
  };
  check_lowpass(emg_lowpass_hz, "emg_lowpass_hz");
  check_lowpass(kin_lowpass_hz, "kin_lowpass_hz");
  FilterSpec{FilterKind::high_pass, highpass_order, emg_highpass_hz, double(window.input_rate_hz)}.validate();
  FilterSpec{FilterKind::low_pass, lowpass_order, emg_lowpass_hz, double(window.input_rate_hz)}.validate();
}

std::vector<double> condition_channel(std::span<const double> raw, ChannelKind kind,
                                      const PreprocessConfig& config) {
  std::vector<double> out(raw.size());
  if (raw.empty()) return out;
  const double fs = config.window.input_rate_hz;
  // Filters start from the steady state of the first sample: subtract it,
  // run from zero state, then restore the DC level the filter would pass.
  const double origin = raw.front();
  if (kind == ChannelKind::emg) {
    auto hp = design_butterworth({FilterKind::high_pass, config.highpass_order, config.emg_highpass_hz, fs});
    auto lp = design_butterworth({FilterKind::low_pass, config.lowpass_order, config.emg_lowpass_hz, fs});
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = lp.step(std::abs(hp.step(raw[i] - origin)));
    return out;
  }
  auto lp = design_butterworth({FilterKind::low_pass, config.lowpass_order, config.kin_lowpass_hz, fs});
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = lp.step(raw[i] - origin) + origin;
  return out;
}

ChannelStats standardize(std::span<double> values) {
  ChannelStats stats;
  if (values.empty()) return stats;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / n;
  // second pass removes the rounding left by the first; a constant channel
  // then gets its exact value back and standardizes to exact zeros
  double residual = 0.0;
  for (double v : values) residual += v - stats.mean;
  stats.mean += residual / n;
  double ss = 0.0;
  for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
  stats.std = std::sqrt(ss / n);
  const double denom = std::max(stats.std, kStdFloor);
  for (double& v : values) v = (v - stats.mean) / denom;
  return stats;
}

std::vector<double> decimate(std::span<const double> values, std::size_t factor) {
  std::vector<double> out;
  if (factor == 0) return out;
  out.reserve(values.size() / factor);
  for (std::size_t i = factor - 1; i < values.size(); i += factor) out.push_back(values[i]);
  return out;
}

std::vector<double> finish_channel(std::span<const double> conditioned, const PreprocessConfig& config,
                                   ChannelStats* stats) {
  auto kept = decimate(conditioned, config.window.decimation());
  auto s = standardize(kept);
  if (stats) *stats = s;
  return kept;
}

PreprocessedWindow preprocess_window(std::span<const std::vector<double>> raw,
                                     std::span<const ChannelKind> kinds, const PreprocessConfig& config,
                                     std::size_t end_index) {
  if (raw.size() != kinds.size()) {
    std::ostringstream m;
    m << "got " << raw.size() << " channels but " << kinds.size() << " channel kinds";
    throw DataError(m.str(), "shape");
  }
  const std::size_t expected = config.window.input_samples();
  PreprocessedWindow out;
  out.end_index = end_index;
  bool have_kinematic = false;
  for (std::size_t c = 0; c < raw.size(); ++c) {
    const auto& ch = raw[c];
    if (ch.size() != expected) {
      std::ostringstream m;
      m << "channel " << c << " has " << ch.size() << " samples, expected " << expected;
      throw DataError(m.str(), "shape");
    }
    for (std::size_t i = 0; i < ch.size(); ++i) {
      if (!std::isfinite(ch[i])) {
        std::ostringstream m;
        m << "channel " << c << " sample " << i << " is not finite";
        throw DataError(m.str());
      }
    }
    auto conditioned = condition_channel(ch, kinds[c], config);
    switch (kinds[c]) {
      case ChannelKind::emg:
        out.emg.push_back(finish_channel(conditioned, config));
        break;
      case ChannelKind::kinematic:
        if (have_kinematic) throw DataError("more than one kinematic channel", "shape");
        have_kinematic = true;
        out.kinematic = finish_channel(conditioned, config, &out.kinematic_stats);
        break;
      case ChannelKind::force:
        out.forces.push_back(finish_channel(conditioned, config));
        break;
    }
  }
  return out;
}

}  // namespace kneecast::signal
