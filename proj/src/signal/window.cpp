#include "kneecast/signal/window.hpp"

#include <sstream>

#include "kneecast/error.hpp"

namespace kneecast::signal {

void WindowSpec::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m, "invalid_spec"); };
  if (window_ms <= 0 || stride_ms <= 0) fail("window and stride must be positive");
  if (input_rate_hz <= 0 || output_rate_hz <= 0) fail("sample rates must be positive");
  if (input_rate_hz % output_rate_hz != 0) {
    std::ostringstream m;
    m << "input rate " << input_rate_hz << " Hz is not a multiple of output rate " << output_rate_hz << " Hz";
    fail(m.str());
  }
  const auto in = static_cast<std::int64_t>(window_ms) * input_rate_hz;
  const auto out = static_cast<std::int64_t>(window_ms) * output_rate_hz;
  const auto hop = static_cast<std::int64_t>(stride_ms) * input_rate_hz;
  if (in % 1000 != 0 || out % 1000 != 0 || hop % 1000 != 0) {
    fail("window/stride durations must map to whole samples at both rates");
  }
}

std::size_t WindowSpec::input_samples() const {
  return static_cast<std::size_t>(static_cast<std::int64_t>(window_ms) * input_rate_hz / 1000);
}

std::size_t WindowSpec::output_samples() const {
  return static_cast<std::size_t>(static_cast<std::int64_t>(window_ms) * output_rate_hz / 1000);
}

std::size_t WindowSpec::stride_samples() const {
  return static_cast<std::size_t>(static_cast<std::int64_t>(stride_ms) * input_rate_hz / 1000);
}

std::size_t WindowSpec::decimation() const {
  return static_cast<std::size_t>(input_rate_hz / output_rate_hz);
}

std::vector<std::size_t> segment_stream(std::int64_t recording_length_ms, const WindowSpec& spec) {
  spec.validate();
  std::vector<std::size_t> ends;
  if (recording_length_ms < spec.window_ms) return ends;
  const std::int64_t n = (recording_length_ms - spec.window_ms) / spec.stride_ms + 1;
  ends.reserve(static_cast<std::size_t>(n));
  const std::size_t window = spec.input_samples();
  const std::size_t hop = spec.stride_samples();
  for (std::int64_t k = 0; k < n; ++k) {
    ends.push_back(static_cast<std::size_t>(k) * hop + window - 1);
  }
  return ends;
}

std::vector<std::size_t> segment_samples(std::size_t n_samples, const WindowSpec& spec) {
  spec.validate();
  // Work in samples so that non-millisecond rates stay exact.
  std::vector<std::size_t> ends;
  const std::size_t window = spec.input_samples();
  const std::size_t hop = spec.stride_samples();
  if (n_samples < window) return ends;
  const std::size_t n = (n_samples - window) / hop + 1;
  ends.reserve(n);
  for (std::size_t k = 0; k < n; ++k) ends.push_back(k * hop + window - 1);
  return ends;
}

}  // namespace kneecast::signal
