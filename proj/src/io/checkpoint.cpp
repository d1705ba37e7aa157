#include "kneecast/io/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "kneecast/error.hpp"
#include "kneecast/io/atomic_file.hpp"

namespace kneecast::io {

using nlohmann::json;

namespace {

constexpr std::string_view kMagic = "KNEECAST";

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

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    v = to_little(v);
    return v;
  }

  std::string_view take(std::uint64_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }

 private:
  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) throw DataError("checkpoint is truncated", "corruption");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos), n);
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

json conv_json(const model::ConvSpec& c) { return {{"filters", c.filters}, {"kernel", c.kernel}, {"stride", c.stride}}; }

model::ConvSpec conv_from(const json& j) {
  return {j.at("filters").get<std::size_t>(), j.at("kernel").get<std::size_t>(), j.at("stride").get<std::size_t>()};
}

json architecture(const model::Model& m) {
  const auto& h = m.hyper;
  return {{"scenario", std::string(to_string(m.scenario))},
          {"conv1", conv_json(h.conv1)},
          {"conv2", conv_json(h.conv2)},
          {"emg_feature_dim", h.emg_feature_dim},
          {"lstm1_hidden", h.lstm1_hidden},
          {"lstm2_hidden", h.lstm2_hidden},
          {"kin_lstm_hidden", h.kin_lstm_hidden},
          {"attn_dim", h.attn_dim},
          {"force_feature_dim", h.force_feature_dim},
          {"horizon", h.horizon},
          {"input_length", h.input_length}};
}

model::ModelHyper hyper_from(const json& j) {
  model::ModelHyper h;
  h.conv1 = conv_from(j.at("conv1"));
  h.conv2 = conv_from(j.at("conv2"));
  h.emg_feature_dim = j.at("emg_feature_dim").get<std::size_t>();
  h.lstm1_hidden = j.at("lstm1_hidden").get<std::size_t>();
  h.lstm2_hidden = j.at("lstm2_hidden").get<std::size_t>();
  h.kin_lstm_hidden = j.at("kin_lstm_hidden").get<std::size_t>();
  h.attn_dim = j.at("attn_dim").get<std::size_t>();
  h.force_feature_dim = j.at("force_feature_dim").get<std::size_t>();
  h.horizon = j.at("horizon").get<int>();
  h.input_length = j.at("input_length").get<std::size_t>();
  return h;
}

json preprocess_json(const signal::PreprocessConfig& c) {
  return {{"window_ms", c.window.window_ms},
          {"stride_ms", c.window.stride_ms},
          {"input_rate_hz", c.window.input_rate_hz},
          {"output_rate_hz", c.window.output_rate_hz},
          {"emg_highpass_hz", c.emg_highpass_hz},
          {"emg_lowpass_hz", c.emg_lowpass_hz},
          {"kin_lowpass_hz", c.kin_lowpass_hz},
          {"highpass_order", c.highpass_order},
          {"lowpass_order", c.lowpass_order},
          {"streaming", c.streaming}};
}

signal::PreprocessConfig preprocess_from(const json& j) {
  signal::PreprocessConfig c;
  c.window.window_ms = j.at("window_ms").get<int>();
  c.window.stride_ms = j.at("stride_ms").get<int>();
  c.window.input_rate_hz = j.at("input_rate_hz").get<int>();
  c.window.output_rate_hz = j.at("output_rate_hz").get<int>();
  c.emg_highpass_hz = j.at("emg_highpass_hz").get<double>();
  c.emg_lowpass_hz = j.at("emg_lowpass_hz").get<double>();
  c.kin_lowpass_hz = j.at("kin_lowpass_hz").get<double>();
  c.highpass_order = j.at("highpass_order").get<int>();
  c.lowpass_order = j.at("lowpass_order").get<int>();
  c.streaming = j.at("streaming").get<bool>();
  return c;
}

}  // namespace

std::string architecture_json(const model::Model& model) { return architecture(model).dump(); }

std::string serialize_checkpoint(const model::Model& m) {
  json groups = json::object();
  for (model::Group g : model::kGroups) {
    groups[std::string(model::to_string(g))] = {{"trainable", m.settings(g).trainable},
                                                {"lr_scale", m.settings(g).lr_scale}};
  }
  const json header{{"format_version", kCheckpointVersion},
                    {"architecture", architecture(m)},
                    {"preprocess", preprocess_json(m.preprocess)},
                    {"target_stats",
                     {{"mean", m.target_stats.mean}, {"std", m.target_stats.std}, {"fitted", m.target_stats.fitted}}},
                    {"seed", std::to_string(m.seed)},
                    {"groups", groups},
                    {"provenance", m.provenance}};
  json manifest = json::array();
  std::size_t offset = 0;
  for (const auto& p : m.params) {
    manifest.push_back({{"name", p.name},
                        {"group", std::string(model::to_string(p.group))},
                        {"shape", p.tensor.shape},
                        {"offset", offset},
                        {"count", p.tensor.size()}});
    offset += p.tensor.size();
  }
  const std::string h = header.dump();
  const std::string man = manifest.dump();

  std::string out(kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, h.size());
  out += h;
  put<std::uint64_t>(out, man.size());
  out += man;
  put<std::uint64_t>(out, offset);
  out.reserve(out.size() + offset * 8 + 4);
  for (const auto& p : m.params) {
    for (double v : p.tensor.values) put<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  put<std::uint32_t>(out, crc32_of(out));
  return out;
}

model::Model deserialize_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(std::min(bytes.size(), kMagic.size())) != kMagic) {
    throw DataError("not a kneecast checkpoint (bad magic)", "corruption");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint format version " + std::to_string(version) + " is not supported; this build reads " +
                        "version " + std::to_string(kCheckpointVersion) + ", re-save it with a matching release",
                    "upgrade");
  }
  if (bytes.size() < 4 + r.pos()) throw DataError("checkpoint is truncated", "corruption");
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, 4);
  stored = to_little(stored);
  if (crc32_of(bytes.substr(0, bytes.size() - 4)) != stored) {
    throw DataError("checkpoint checksum mismatch (file truncated or corrupted)", "corruption");
  }

  json header, manifest;
  try {
    header = json::parse(r.take(r.get<std::uint64_t>()));
    manifest = json::parse(r.take(r.get<std::uint64_t>()));
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint metadata is unreadable: ") + e.what(), "corruption");
  }
  const auto n_values = r.get<std::uint64_t>();
  if (n_values > (bytes.size() - r.pos()) / 8 || r.pos() + n_values * 8 + 4 != bytes.size()) {
    throw DataError("checkpoint blob length does not match the file size", "corruption");
  }

  model::Model m;
  try {
    const auto& arch = header.at("architecture");
    m.scenario = parse_scenario(arch.at("scenario").get<std::string>());
    m.hyper = hyper_from(arch);
    m.preprocess = preprocess_from(header.at("preprocess"));
    const auto& ts = header.at("target_stats");
    m.target_stats = {ts.at("mean").get<double>(), ts.at("std").get<double>(), ts.at("fitted").get<bool>()};
    m.seed = std::stoull(header.at("seed").get<std::string>());
    for (model::Group g : model::kGroups) {
      const auto& gj = header.at("groups").at(std::string(model::to_string(g)));
      m.settings(g) = {gj.at("trainable").get<bool>(), gj.at("lr_scale").get<double>()};
    }
    m.provenance = header.at("provenance").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint header is invalid: ") + e.what(), "corruption");
  }

  const auto decls = model::declare_parameters(m.scenario, m.hyper);
  if (!manifest.is_array() || manifest.size() != decls.size()) {
    throw DataError("checkpoint manifest does not match its architecture", "corruption");
  }
  std::uint64_t expected_offset = 0;
  for (std::size_t i = 0; i < decls.size(); ++i) {
    const auto& e = manifest[i];
    std::string name;
    ad::Shape shape;
    std::uint64_t offset = 0, count = 0;
    try {
      name = e.at("name").get<std::string>();
      shape = e.at("shape").get<ad::Shape>();
      offset = e.at("offset").get<std::uint64_t>();
      count = e.at("count").get<std::uint64_t>();
    } catch (const json::exception& ex) {
      throw DataError(std::string("checkpoint manifest entry is invalid: ") + ex.what(), "corruption");
    }
    if (name != decls[i].name || shape != decls[i].shape || count != ad::numel(shape)) {
      throw DataError("checkpoint manifest entry '" + name + "' does not match the architecture", "corruption");
    }
    if (offset != expected_offset) {
      throw DataError("checkpoint manifest offsets overlap or leave gaps at '" + name + "'", "corruption");
    }
    expected_offset += count;
  }
  if (expected_offset != n_values) throw DataError("checkpoint manifest does not cover the blob", "corruption");

  for (const auto& d : decls) {
    ad::Tensor t = ad::Tensor::zeros(d.shape, true);
    for (double& v : t.values) v = std::bit_cast<double>(r.get<std::uint64_t>());
    m.params.push_back({d.name, d.group, std::move(t)});
  }
  return m;
}

void save_checkpoint(const model::Model& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_checkpoint(model));
}

model::Model load_checkpoint(const std::filesystem::path& path) { return deserialize_checkpoint(read_file(path)); }

}  // namespace kneecast::io
