#include "kneecast/io/run_config.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "kneecast/error.hpp"
#include "kneecast/io/atomic_file.hpp"

namespace kneecast::io {

using nlohmann::json;

namespace {

std::string type_name(const json& v) {
  if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
  if (v.is_number_float()) return "number";
  return v.type_name();
}

bool has_type(const json& v, const std::string& type) {
  if (type == "integer") {
    if (v.is_number_integer() || v.is_number_unsigned()) return true;
    return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
  }
  if (type == "number") return v.is_number();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "null") return v.is_null();
  return false;
}

class Validator {
 public:
  explicit Validator(const json& root) : root_(root) {}

  void check(const json& v, const json& s, const std::string& path) {
    if (s.contains("$ref")) {
      const auto ref = s["$ref"].get<std::string>();
      if (ref.rfind("#/", 0) != 0) throw ConfigError("unsupported schema reference " + ref, "schema");
      check(v, root_.at(json::json_pointer(ref.substr(1))), path);
      return;
    }
    if (s.contains("type") && !has_type(v, s["type"].get<std::string>())) {
      fail(path, "expected " + s["type"].get<std::string>() + ", got " + type_name(v));
      return;
    }
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) {
        if (e == v || (e.is_number() && v.is_number() && e.get<double>() == v.get<double>())) found = true;
      }
      if (!found) fail(path, "value " + v.dump() + " is not one of " + s["enum"].dump());
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>()) fail(path, "must be >= " + s["minimum"].dump());
      if (s.contains("maximum") && x > s["maximum"].get<double>()) fail(path, "must be <= " + s["maximum"].dump());
      if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>()) {
        fail(path, "must be > " + s["exclusiveMinimum"].dump());
      }
      if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>()) {
        fail(path, "must be < " + s["exclusiveMaximum"].dump());
      }
    }
    if (v.is_object()) {
      if (s.contains("required")) {
        for (const auto& r : s["required"]) {
          if (!v.contains(r.get<std::string>())) fail(path, "missing required field '" + r.get<std::string>() + "'");
        }
      }
      const json props = s.value("properties", json::object());
      for (const auto& [key, value] : v.items()) {
        const std::string child = path + "/" + key;
        if (props.contains(key)) {
          check(value, props[key], child);
        } else if (s.contains("additionalProperties")) {
          const auto& ap = s["additionalProperties"];
          if (ap.is_boolean()) {
            if (!ap.get<bool>()) fail(child, "unknown field");
          } else {
            check(value, ap, child);
          }
        }
      }
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) {
        fail(path, "needs at least " + s["minItems"].dump() + " item(s)");
      }
      if (s.contains("items")) {
        for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], path + "/" + std::to_string(i));
      }
    }
  }

  std::vector<std::string> errors;

 private:
  void fail(const std::string& path, const std::string& msg) { errors.push_back((path.empty() ? "/" : path) + ": " + msg); }
  const json& root_;
};

template <typename T>
void read(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

model::ConvSpec conv_from(const json& j) {
  return {j.at("filters").get<std::size_t>(), j.at("kernel").get<std::size_t>(), j.at("stride").get<std::size_t>()};
}

}  // namespace

std::vector<std::string> schema_violations(std::string_view document, std::string_view schema) {
  json doc, sch;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    return {std::string("/: not valid JSON (") + e.what() + ")"};
  }
  sch = json::parse(schema);
  Validator v(sch);
  v.check(doc, sch, "");
  return v.errors;
}

RunConfig parse_run_config(std::string_view text) {
  const auto violations = schema_violations(text, run_config_schema());
  if (!violations.empty()) {
    std::string msg = "run config does not match the schema:";
    for (const auto& v : violations) msg += " " + v + ";";
    throw ConfigError(msg, "schema");
  }
  const json j = json::parse(text);
  RunConfig c;
  if (j.contains("scenario")) c.scenario = parse_scenario(j["scenario"].get<std::string>());
  read(j, "horizon", c.horizon);
  read(j, "seed", c.seed);
  read(j, "output_dir", c.output_dir);
  c.split.seed = c.seed;
  c.train.seed = c.seed;

  if (j.contains("window")) {
    const auto& w = j["window"];
    read(w, "window_ms", c.preprocess.window.window_ms);
    read(w, "stride_ms", c.preprocess.window.stride_ms);
    read(w, "input_rate_hz", c.preprocess.window.input_rate_hz);
    read(w, "output_rate_hz", c.preprocess.window.output_rate_hz);
  }
  if (j.contains("filters")) {
    const auto& f = j["filters"];
    read(f, "emg_highpass_hz", c.preprocess.emg_highpass_hz);
    read(f, "emg_lowpass_hz", c.preprocess.emg_lowpass_hz);
    read(f, "kin_lowpass_hz", c.preprocess.kin_lowpass_hz);
    read(f, "highpass_order", c.preprocess.highpass_order);
    read(f, "lowpass_order", c.preprocess.lowpass_order);
    read(f, "streaming", c.preprocess.streaming);
  }
  if (j.contains("model")) {
    const auto& m = j["model"];
    if (m.contains("conv1")) c.hyper.conv1 = conv_from(m["conv1"]);
    if (m.contains("conv2")) c.hyper.conv2 = conv_from(m["conv2"]);
    read(m, "emg_feature_dim", c.hyper.emg_feature_dim);
    read(m, "lstm1_hidden", c.hyper.lstm1_hidden);
    read(m, "lstm2_hidden", c.hyper.lstm2_hidden);
    read(m, "kin_lstm_hidden", c.hyper.kin_lstm_hidden);
    read(m, "attn_dim", c.hyper.attn_dim);
    read(m, "force_feature_dim", c.hyper.force_feature_dim);
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    read(t, "batch_size", c.train.batch_size);
    read(t, "max_epochs", c.train.max_epochs);
    read(t, "patience", c.train.patience);
    read(t, "base_lr", c.train.base_lr);
    read(t, "lr_scale", c.train.lr_scale);
    read(t, "beta1", c.train.adam.beta1);
    read(t, "beta2", c.train.adam.beta2);
    read(t, "epsilon", c.train.adam.epsilon);
    read(t, "clip_norm", c.train.clip_norm);
    read(t, "micro_batch", c.train.micro_batch);
    read(t, "shuffle", c.train.shuffle);
  }
  if (j.contains("split")) {
    const auto& s = j["split"];
    if (s.contains("kind")) c.split.kind = data::parse_split_kind(s["kind"].get<std::string>());
    if (s.contains("ordering")) c.split.shuffled = s["ordering"].get<std::string>() == "shuffled";
    read(s, "seed", c.split.seed);
    read(s, "held_out_subject", c.split.held_out_subject);
  }
  if (j.contains("data")) c.data = j["data"].get<std::map<std::string, std::vector<std::string>>>();
  if (j.contains("stages")) {
    for (const auto& s : j["stages"]) {
      train::Stage st;
      st.name = s["name"].get<std::string>();
      st.kind = train::parse_stage_kind(s["kind"].get<std::string>());
      read(s, "from", st.from);
      read(s, "train", st.train_data);
      read(s, "validation", st.validation_data);
      read(s, "eval", st.eval_data);
      read(s, "lr_scale", st.lr_scale);
      if (s.contains("max_epochs")) st.max_epochs = s["max_epochs"].get<int>();
      if (s.contains("frozen")) {
        for (const auto& g : s["frozen"]) st.frozen.push_back(model::parse_group(g.get<std::string>()));
      }
      if (s.contains("scenario")) st.scenario = parse_scenario(s["scenario"].get<std::string>());
      if (s.contains("horizon")) st.horizon = s["horizon"].get<int>();
      for (const auto* ref : {&st.train_data, &st.validation_data, &st.eval_data}) {
        if (!ref->empty() && !c.data.count(*ref)) {
          throw ConfigError("stage '" + st.name + "' references data set '" + *ref + "' not listed under data",
                            "schema");
        }
      }
      c.stages.push_back(std::move(st));
    }
  }

  c.hyper.horizon = c.horizon;
  c.preprocess.validate();
  c.hyper.validate();
  c.train.validate();
  if (c.hyper.input_length != c.preprocess.window.output_samples()) {
    c.hyper.input_length = c.preprocess.window.output_samples();
    c.hyper.validate();
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what(), "io");
  }
  return parse_run_config(text);
}

}  // namespace kneecast::io
