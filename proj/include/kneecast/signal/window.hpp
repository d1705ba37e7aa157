#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace kneecast::signal {

/// Sliding-window geometry. The stride is the hop between window starts.
struct WindowSpec {
  int window_ms = 2000;
  int stride_ms = 40;
  int input_rate_hz = 1000;
  int output_rate_hz = 100;

  void validate() const;

  std::size_t input_samples() const;
  std::size_t output_samples() const;
  std::size_t stride_samples() const;
  std::size_t decimation() const;
};

/// End indices (in input samples) of every complete window that fits into a
/// recording of `recording_length_ms`. Window k spans [k*stride, k*stride + window).
std::vector<std::size_t> segment_stream(std::int64_t recording_length_ms, const WindowSpec& spec);

/// Same as segment_stream for a recording given in samples at spec.input_rate_hz.
std::vector<std::size_t> segment_samples(std::size_t n_samples, const WindowSpec& spec);

}  // namespace kneecast::signal
