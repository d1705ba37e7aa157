#include "kneecast/io/example_cache.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "kneecast/error.hpp"
#include "kneecast/io/atomic_file.hpp"

namespace kneecast::io {

using nlohmann::json;

namespace {

constexpr std::string_view kMagic = "KNEXCACH";

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto b = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(b.begin(), b.end());
    v = std::bit_cast<T>(b);
  }
  return v;
}

template <typename T>
void put(std::string& out, T v) {
  v = to_little(v);
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void put_values(std::string& out, const std::vector<double>& values) {
  for (double v : values) put<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
}

std::uint32_t crc_of(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

[[noreturn]] void corrupt(const std::string& what) { throw DataError("example cache: " + what, "corruption"); }

}  // namespace

std::string serialize_examples(const ExampleCache& c) {
  const std::size_t len = c.preprocess.window.output_samples();
  json rows = json::array();
  for (const auto& ex : c.examples) {
    rows.push_back({{"subject_id", ex.subject_id},
                    {"trial_id", ex.trial_id},
                    {"window_start", ex.window_start},
                    {"end_index", ex.inputs.end_index},
                    {"end_time_ms", ex.end_time_ms},
                    {"last_observed_deg", ex.last_observed_deg},
                    {"kin_mean", ex.inputs.kinematic_stats.mean},
                    {"kin_std", ex.inputs.kinematic_stats.std},
                    {"n_emg", ex.inputs.emg.size()},
                    {"has_kinematic", !ex.inputs.kinematic.empty()},
                    {"n_forces", ex.inputs.forces.size()},
                    {"n_target", ex.target.size()}});
  }
  const auto& w = c.preprocess.window;
  const json header{{"version", kExampleCacheVersion},
                    {"scenario", std::string(to_string(c.scenario))},
                    {"horizon", c.horizon},
                    {"samples_per_channel", len},
                    {"preprocess",
                     {{"window_ms", w.window_ms},
                      {"stride_ms", w.stride_ms},
                      {"input_rate_hz", w.input_rate_hz},
                      {"output_rate_hz", w.output_rate_hz},
                      {"emg_highpass_hz", c.preprocess.emg_highpass_hz},
                      {"emg_lowpass_hz", c.preprocess.emg_lowpass_hz},
                      {"kin_lowpass_hz", c.preprocess.kin_lowpass_hz},
                      {"highpass_order", c.preprocess.highpass_order},
                      {"lowpass_order", c.preprocess.lowpass_order},
                      {"streaming", c.preprocess.streaming}}},
                    {"examples", rows}};
  const std::string h = header.dump();
  std::string out(kMagic);
  put<std::uint32_t>(out, kExampleCacheVersion);
  put<std::uint64_t>(out, h.size());
  out += h;
  for (const auto& ex : c.examples) {
    for (const auto& ch : ex.inputs.emg) put_values(out, ch);
    put_values(out, ex.inputs.kinematic);
    for (const auto& ch : ex.inputs.forces) put_values(out, ch);
    put_values(out, ex.target);
  }
  put<std::uint32_t>(out, crc_of(out));
  return out;
}

ExampleCache deserialize_examples(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 4 + 8 + 4 || bytes.substr(0, kMagic.size()) != kMagic) {
    corrupt("bad magic or truncated file");
  }
  std::size_t pos = kMagic.size();
  auto get_u32 = [&] {
    std::uint32_t v;
    std::memcpy(&v, bytes.data() + pos, 4);
    pos += 4;
    return to_little(v);
  };
  const auto version = get_u32();
  if (version != kExampleCacheVersion) {
    throw DataError("example cache version " + std::to_string(version) + " is not supported (expected " +
                        std::to_string(kExampleCacheVersion) + "); regenerate it with `kneecast preprocess`",
                    "upgrade");
  }
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, 4);
  if (crc_of(bytes.substr(0, bytes.size() - 4)) != to_little(stored)) corrupt("checksum mismatch");
  std::uint64_t hlen;
  std::memcpy(&hlen, bytes.data() + pos, 8);
  hlen = to_little(hlen);
  pos += 8;
  if (hlen > bytes.size() - pos - 4) corrupt("header length exceeds file");

  ExampleCache c;
  std::size_t len = 0;
  json rows;
  try {
    const json header = json::parse(bytes.substr(pos, hlen));
    c.scenario = parse_scenario(header.at("scenario").get<std::string>());
    c.horizon = header.at("horizon").get<int>();
    len = header.at("samples_per_channel").get<std::size_t>();
    const auto& p = header.at("preprocess");
    c.preprocess.window.window_ms = p.at("window_ms").get<int>();
    c.preprocess.window.stride_ms = p.at("stride_ms").get<int>();
    c.preprocess.window.input_rate_hz = p.at("input_rate_hz").get<int>();
    c.preprocess.window.output_rate_hz = p.at("output_rate_hz").get<int>();
    c.preprocess.emg_highpass_hz = p.at("emg_highpass_hz").get<double>();
    c.preprocess.emg_lowpass_hz = p.at("emg_lowpass_hz").get<double>();
    c.preprocess.kin_lowpass_hz = p.at("kin_lowpass_hz").get<double>();
    c.preprocess.highpass_order = p.at("highpass_order").get<int>();
    c.preprocess.lowpass_order = p.at("lowpass_order").get<int>();
    c.preprocess.streaming = p.at("streaming").get<bool>();
    rows = header.at("examples");
  } catch (const json::exception& e) {
    corrupt(std::string("invalid header: ") + e.what());
  }
  pos += hlen;
  const std::size_t end = bytes.size() - 4;
  auto read_values = [&](std::size_t n) {
    if (n > (end - pos) / 8) corrupt("value blob is truncated");
    std::vector<double> v(n);
    for (double& x : v) {
      std::uint64_t u;
      std::memcpy(&u, bytes.data() + pos, 8);
      pos += 8;
      x = std::bit_cast<double>(to_little(u));
    }
    return v;
  };
  try {
    for (const auto& r : rows) {
      data::PreprocessedExample ex;
      ex.subject_id = r.at("subject_id").get<std::string>();
      ex.trial_id = r.at("trial_id").get<std::string>();
      ex.window_start = r.at("window_start").get<std::size_t>();
      ex.inputs.end_index = r.at("end_index").get<std::size_t>();
      ex.end_time_ms = r.at("end_time_ms").get<double>();
      ex.last_observed_deg = r.at("last_observed_deg").get<double>();
      ex.inputs.kinematic_stats = {r.at("kin_mean").get<double>(), r.at("kin_std").get<double>()};
      ex.horizon = c.horizon;
      const auto n_emg = r.at("n_emg").get<std::size_t>();
      for (std::size_t k = 0; k < n_emg; ++k) ex.inputs.emg.push_back(read_values(len));
      if (r.at("has_kinematic").get<bool>()) ex.inputs.kinematic = read_values(len);
      const auto n_forces = r.at("n_forces").get<std::size_t>();
      for (std::size_t k = 0; k < n_forces; ++k) ex.inputs.forces.push_back(read_values(len));
      ex.target = read_values(r.at("n_target").get<std::size_t>());
      c.examples.push_back(std::move(ex));
    }
  } catch (const json::exception& e) {
    corrupt(std::string("invalid example record: ") + e.what());
  }
  if (pos != end) corrupt("trailing bytes after the last example");
  return c;
}

void save_examples(const ExampleCache& cache, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_examples(cache));
}

ExampleCache load_examples(const std::filesystem::path& path) { return deserialize_examples(read_file(path)); }

bool is_example_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char buf[8] = {};
  in.read(buf, sizeof buf);
  return in.gcount() == 8 && std::string_view(buf, 8) == kMagic;
}

}  // namespace kneecast::io
