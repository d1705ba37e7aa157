#include "kneecast/data/examples.hpp"

#include <sstream>

#include "kneecast/error.hpp"
#include "kneecast/parallel.hpp"
#include "kneecast/signal/window.hpp"

namespace kneecast::data {

bool is_supported_horizon(int horizon) { return horizon == 1 || horizon == 26 || horizon == 50; }

std::string example_key(const PreprocessedExample& ex) {
  std::ostringstream k;
  k << ex.subject_id << '/' << ex.trial_id << '@' << ex.inputs.end_index;
  return k.str();
}

std::vector<PreprocessedExample> make_examples(const Recording& recording, Scenario scenario, int horizon,
                                               const signal::PreprocessConfig& config) {
  config.validate();
  recording.validate();
  if (horizon != 0 && !is_supported_horizon(horizon)) {
    throw ConfigError("horizon must be 1, 26 or 50, got " + std::to_string(horizon), "horizon");
  }
  if (std::abs(recording.sample_rate_hz - config.window.input_rate_hz) > 1e-9) {
    std::ostringstream m;
    m << "recording rate " << recording.sample_rate_hz << " Hz does not match window input rate "
      << config.window.input_rate_hz << " Hz";
    throw ConfigError(m.str(), "rate");
  }
  if (uses_forces(scenario) && !recording.has_forces()) {
    throw ConfigError("scenario " + std::string(to_string(scenario)) + " requires force channels; recording '" +
                          recording.subject_id + "' has none",
                      "scenario");
  }

  using signal::ChannelKind;
  std::vector<const std::vector<double>*> channels;
  std::vector<ChannelKind> kinds;
  for (const auto& ch : recording.emg) {
    channels.push_back(&ch);
    kinds.push_back(ChannelKind::emg);
  }
  channels.push_back(&recording.knee_angle_deg);
  kinds.push_back(ChannelKind::kinematic);
  if (uses_forces(scenario)) {
    channels.push_back(&*recording.force_thigh_n);
    kinds.push_back(ChannelKind::force);
    channels.push_back(&*recording.force_shank_n);
    kinds.push_back(ChannelKind::force);
  }

  const std::size_t n = recording.size();
  const std::size_t window = config.window.input_samples();
  const std::size_t dec = config.window.decimation();
  std::vector<std::size_t> ends;
  for (std::size_t end : signal::segment_samples(n, config.window)) {
    if (end + static_cast<std::size_t>(horizon) * dec < n) ends.push_back(end);
  }

  // Streaming mode filters the whole stream once; state then carries across hops.
  std::vector<std::vector<double>> streamed;
  if (config.streaming) {
    streamed.resize(channels.size());
    for (std::size_t c = 0; c < channels.size(); ++c) {
      streamed[c] = signal::condition_channel(*channels[c], kinds[c], config);
    }
  }

  std::vector<PreprocessedExample> out(ends.size());
  parallel_for(ends.size(), [&](std::size_t w) {
    const std::size_t end = ends[w];
    const std::size_t start = end + 1 - window;
    PreprocessedExample& ex = out[w];
    if (config.streaming) {
      auto& win = ex.inputs;
      win.end_index = end;
      for (std::size_t c = 0; c < channels.size(); ++c) {
        std::span<const double> slice(streamed[c].data() + start, window);
        switch (kinds[c]) {
          case ChannelKind::emg: win.emg.push_back(signal::finish_channel(slice, config)); break;
          case ChannelKind::kinematic:
            win.kinematic = signal::finish_channel(slice, config, &win.kinematic_stats);
            break;
          case ChannelKind::force: win.forces.push_back(signal::finish_channel(slice, config)); break;
        }
      }
    } else {
      std::vector<std::vector<double>> raw(channels.size());
      for (std::size_t c = 0; c < channels.size(); ++c) {
        raw[c].assign(channels[c]->begin() + static_cast<std::ptrdiff_t>(start),
                      channels[c]->begin() + static_cast<std::ptrdiff_t>(end + 1));
      }
      ex.inputs = signal::preprocess_window(raw, kinds, config, end);
    }
    ex.horizon = horizon;
    ex.window_start = start;
    ex.end_time_ms = recording.time_ms.empty() ? static_cast<double>(end) * 1000.0 / recording.sample_rate_hz
                                               : recording.time_ms[end];
    ex.last_observed_deg = recording.knee_angle_deg[end];
    ex.subject_id = recording.subject_id;
    ex.trial_id = recording.trial_id;
    ex.target.resize(static_cast<std::size_t>(horizon));
    for (int j = 1; j <= horizon; ++j) {
      ex.target[static_cast<std::size_t>(j - 1)] = recording.knee_angle_deg[end + static_cast<std::size_t>(j) * dec];
    }
  });
  return out;
}

}  // namespace kneecast::data
