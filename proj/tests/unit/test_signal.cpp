#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../oracle_values.hpp"
#include "kneecast/error.hpp"
#include "kneecast/signal/butterworth.hpp"
#include "kneecast/signal/preprocess.hpp"
#include "kneecast/signal/window.hpp"
#include "support.hpp"

using namespace kneecast;
using namespace kneecast::signal;

TEST_SUITE_BEGIN("signal");

namespace {

std::vector<double> sine(double f, double fs, std::size_t n, double amp = 1.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = amp * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / fs);
  return v;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

TEST_CASE("butterworth low-pass DC gain and cutoff") {
  auto lp = design_butterworth({FilterKind::low_pass, 2, 5.0, 1000.0});
  CHECK(lp.gain(0.0, 1000.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(lp.gain(5.0, 1000.0) - 1.0 / std::sqrt(2.0)) < 1e-3);
  CHECK(lp.gain(5.0, 1000.0) == doctest::Approx(oracle::kLowPass5GainAt5).epsilon(1e-9));
}

TEST_CASE("butterworth high-pass coefficients match the bilinear oracle") {
  auto hp = design_butterworth({FilterKind::high_pass, 2, 20.0, 1000.0});
  REQUIRE(hp.sections().size() == 1);
  const auto& s = hp.sections()[0];
  const double got[5] = {s.b0, s.b1, s.b2, s.a1, s.a2};
  for (int i = 0; i < 5; ++i) CHECK(got[i] == doctest::Approx(oracle::kHighPass20[i]).epsilon(1e-12));
  CHECK(hp.gain(500.0, 1000.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("low-pass order 2 coefficients match the oracle") {
  auto lp = design_butterworth({FilterKind::low_pass, 2, 5.0, 1000.0});
  const auto& s = lp.sections()[0];
  const double got[5] = {s.b0, s.b1, s.b2, s.a1, s.a2};
  for (int i = 0; i < 5; ++i) CHECK(got[i] == doctest::Approx(oracle::kLowPass5[i]).epsilon(1e-10));
}

TEST_CASE("invalid filter specs") {
  CHECK_THROWS_AS(design_butterworth({FilterKind::low_pass, 2, 500.0, 1000.0}), ConfigError);
  CHECK_THROWS_AS(design_butterworth({FilterKind::low_pass, 0, 5.0, 1000.0}), ConfigError);
  try {
    design_butterworth({FilterKind::high_pass, 2, 600.0, 1000.0});
  } catch (const ConfigError& e) {
    CHECK(e.category() == "invalid_spec");
  }
}

TEST_CASE("apply_filter examples") {
  auto hp = design_butterworth({FilterKind::high_pass, 2, 20.0, 1000.0});
  auto out = apply_filter(hp, std::vector<double>(2000, 5.0));
  REQUIRE(out.size() == 2000);
  for (std::size_t i = 1000; i < 2000; ++i) CHECK(std::abs(out[i]) < 1e-3);

  auto lp = design_butterworth({FilterKind::low_pass, 2, 5.0, 1000.0});
  auto zeros = apply_filter(lp, std::vector<double>(500, 0.0));
  for (double v : zeros) CHECK(v == 0.0);

  CHECK(apply_filter(lp, std::vector<double>{}).empty());

  auto y = apply_filter(lp, sine(50.0, 1000.0, 4000));
  double peak = 0.0;
  for (std::size_t i = 2000; i < y.size(); ++i) peak = std::max(peak, std::abs(y[i]));
  CHECK(peak == doctest::Approx(oracle::kLowPass5GainAt50).epsilon(0.10));
  CHECK(peak == doctest::Approx(0.0099).epsilon(0.10));
}

TEST_CASE("apply_filter is causal for random perturbations") {
  testing::Gen g(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int order = static_cast<int>(g.index(1, 6));
    const double fc = g.real(2.0, 200.0);
    auto cascade = design_butterworth({trial % 2 ? FilterKind::high_pass : FilterKind::low_pass, order, fc, 1000.0});
    auto x = g.normals(300);
    auto x2 = x;
    const std::size_t i = g.index(0, 298);
    for (std::size_t k = i + 1; k < x2.size(); ++k) x2[k] += g.real(-5.0, 5.0);
    auto a = apply_filter(cascade, x), b = apply_filter(cascade, x2);
    for (std::size_t k = 0; k <= i; ++k) REQUIRE(a[k] == b[k]);
  }
}

namespace {

std::size_t last_above(const BiquadCascade& cascade, std::size_t n, double level) {
  std::vector<double> impulse(n, 0.0);
  impulse[0] = 1.0;
  auto h = apply_filter(cascade, impulse);
  std::size_t last = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(h[i]) >= level) last = i;
  return last;
}

}  // namespace

TEST_CASE("designed cascades decay within ten cutoff periods") {
  testing::Gen g(12);
  for (int trial = 0; trial < 60; ++trial) {
    // low orders over most of the band, every order at envelope-range cutoffs
    const bool low_order = trial % 2 == 0;
    const int order = static_cast<int>(low_order ? g.index(1, 6) : g.index(1, 8));
    const double fc = low_order ? g.real(2.0, 150.0) : g.real(2.0, 20.0);
    const auto kind = trial % 4 < 2 ? FilterKind::high_pass : FilterKind::low_pass;
    auto cascade = design_butterworth({kind, order, fc, 1000.0});
    for (const auto& s : cascade.sections()) REQUIRE(s.stable());
    const double bound = 10.0 * 1000.0 / fc;
    CAPTURE(order);
    CAPTURE(fc);
    REQUIRE(static_cast<double>(last_above(cascade, static_cast<std::size_t>(bound) + 400, 1e-6)) <= bound);
  }
}

TEST_CASE("near Nyquist the decay outlasts ten cutoff periods") {
  auto cascade = design_butterworth({FilterKind::low_pass, 2, 400.0, 1000.0});
  const auto last = last_above(cascade, 200, 1e-6);
  CHECK(static_cast<double>(last) > 10.0 * 1000.0 / 400.0);
  CHECK(last < 40);
}

TEST_CASE("segment_stream counts") {
  WindowSpec spec;
  CHECK(segment_stream(2800, spec).size() == static_cast<std::size_t>(oracle::kWindows2800));
  CHECK(segment_stream(2000, spec).size() == 1);
  CHECK(segment_stream(1999, spec).empty());
  auto ends = segment_stream(2800, spec);
  CHECK(ends.front() == 1999);
  CHECK(ends[1] - ends[0] == 40);
}

TEST_CASE("segment_stream matches the counting formula") {
  testing::Gen g(13);
  for (int trial = 0; trial < 200; ++trial) {
    WindowSpec spec;
    spec.stride_ms = static_cast<int>(g.index(1, 10)) * 10;
    const auto len = static_cast<std::int64_t>(g.index(0, 9000));
    const std::size_t expect = len < 2000 ? 0 : static_cast<std::size_t>((len - 2000) / spec.stride_ms + 1);
    REQUIRE(segment_stream(len, spec).size() == expect);
  }
}

TEST_CASE("preprocess_window output shape and constant channels") {
  PreprocessConfig cfg;
  std::vector<std::vector<double>> raw(6, std::vector<double>(2000, 3.0));
  std::vector<ChannelKind> kinds{ChannelKind::emg,       ChannelKind::emg,   ChannelKind::emg,
                                 ChannelKind::emg,       ChannelKind::kinematic, ChannelKind::force};
  auto w = preprocess_window(raw, kinds, cfg, 1999);
  REQUIRE(w.emg.size() == 4);
  for (const auto& ch : w.emg) {
    REQUIRE(ch.size() == 200);
    for (double v : ch) CHECK(v == 0.0);
  }
  REQUIRE(w.kinematic.size() == 200);
  for (double v : w.kinematic) CHECK(v == 0.0);
  REQUIRE(w.forces.size() == 1);
  for (double v : w.forces[0]) CHECK(v == 0.0);
  CHECK(w.end_index == 1999);
}

TEST_CASE("any constant channel standardizes to exact zeros") {
  testing::Gen g(13);
  PreprocessConfig cfg;
  const ChannelKind all[] = {ChannelKind::emg, ChannelKind::kinematic, ChannelKind::force};
  for (int trial = 0; trial < 300; ++trial) {
    const double c = g.real(-1.0, 1.0) * std::pow(10.0, g.real(-6.0, 4.0));
    const auto kind = all[g.index(0, 2)];
    std::vector<std::vector<double>> raw{std::vector<double>(2000, c)};
    auto w = preprocess_window(raw, std::vector<ChannelKind>{kind}, cfg);
    const auto& out = kind == ChannelKind::emg ? w.emg[0] : kind == ChannelKind::kinematic ? w.kinematic : w.forces[0];
    CAPTURE(c);
    for (double v : out) REQUIRE(v == 0.0);
  }
}

TEST_CASE("preprocess_window rejects bad input") {
  PreprocessConfig cfg;
  std::vector<ChannelKind> kinds{ChannelKind::emg};
  std::vector<std::vector<double>> short_raw{std::vector<double>(1999, 0.0)};
  CHECK_THROWS_AS(preprocess_window(short_raw, kinds, cfg), DataError);
  std::vector<std::vector<double>> nan_raw{std::vector<double>(2000, 0.0)};
  nan_raw[0][5] = std::nan("");
  CHECK_THROWS_AS(preprocess_window(nan_raw, kinds, cfg), DataError);
}

TEST_CASE("standardized channels have zero mean and unit deviation") {
  testing::Gen g(14);
  PreprocessConfig cfg;
  std::vector<ChannelKind> kinds{ChannelKind::emg, ChannelKind::emg, ChannelKind::kinematic, ChannelKind::force};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> raw;
    raw.push_back(g.normals(2000, g.real(0.01, 2.0)));
    raw.push_back(sine(g.real(30.0, 200.0), 1000.0, 2000, g.real(0.1, 3.0)));
    raw.push_back(sine(g.real(0.5, 2.0), 1000.0, 2000, 20.0));
    raw.push_back(g.normals(2000, 10.0));
    auto w = preprocess_window(raw, kinds, cfg);
    auto check = [](const std::vector<double>& ch) {
      REQUIRE(ch.size() == 200);
      CHECK(std::abs(mean_of(ch)) < 1e-9);
      CHECK(std::abs(std_of(ch) - 1.0) < 1e-6);
    };
    for (const auto& ch : w.emg) check(ch);
    check(w.kinematic);
    check(w.forces[0]);
  }
}

TEST_CASE("conditioned EMG of an 80 Hz sine sits below 30 Hz") {
  PreprocessConfig cfg;
  auto env = condition_channel(sine(80.0, 1000.0, 2000), ChannelKind::emg, cfg);
  CHECK(testing::power_fraction_above(env, 1000.0, 30.0) < 0.01);
}

TEST_CASE("conditioned synthetic EMG has no aliasing content above 50 Hz") {
  auto rec = data::synthesize_subject(testing::small_subject(3, 4, false));
  PreprocessConfig cfg;
  for (std::size_t ch = 0; ch < 4; ++ch) {
    std::vector<double> raw(rec.emg[ch].begin(), rec.emg[ch].begin() + 2000);
    auto env = condition_channel(raw, ChannelKind::emg, cfg);
    CHECK(testing::power_fraction_above(env, 1000.0, 30.0) < 0.01);
    CHECK(testing::power_fraction_above(env, 1000.0, 50.0) < 0.001);
  }
}

TEST_CASE("conditioning is causal") {
  testing::Gen g(15);
  PreprocessConfig cfg;
  for (int trial = 0; trial < 100; ++trial) {
    const auto kind = trial % 3 == 0 ? ChannelKind::kinematic : ChannelKind::emg;
    auto x = g.normals(2000);
    auto y = x;
    const std::size_t i = g.index(0, 1998);
    for (std::size_t k = i + 1; k < 2000; ++k) y[k] = g.real(-3.0, 3.0);
    auto a = condition_channel(x, kind, cfg), b = condition_channel(y, kind, cfg);
    for (std::size_t k = 0; k <= i; ++k) REQUIRE(a[k] == b[k]);
  }
}

TEST_CASE("decimate keeps the last sample of each group") {
  std::vector<double> x(30);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  auto d = decimate(x, 10);
  REQUIRE(d.size() == 3);
  CHECK(d[0] == 9.0);
  CHECK(d[1] == 19.0);
  CHECK(d[2] == 29.0);
}

TEST_CASE("preprocessing is deterministic") {
  testing::Gen g(16);
  PreprocessConfig cfg;
  std::vector<std::vector<double>> raw{g.normals(2000), g.normals(2000)};
  std::vector<ChannelKind> kinds{ChannelKind::emg, ChannelKind::kinematic};
  auto a = preprocess_window(raw, kinds, cfg);
  auto b = preprocess_window(raw, kinds, cfg);
  CHECK(a.emg == b.emg);
  CHECK(a.kinematic == b.kinematic);
}

TEST_SUITE_END();
