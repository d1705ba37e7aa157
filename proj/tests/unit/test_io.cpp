#include <doctest.h>

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "kneecast/error.hpp"
#include "kneecast/io/checkpoint.hpp"
#include "kneecast/io/example_cache.hpp"
#include "kneecast/io/run_config.hpp"
#include "support.hpp"

using namespace kneecast;

TEST_SUITE_BEGIN("io");

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::string category_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.category();
  }
  return "";
}

model::Model sample_model(Scenario s, std::uint64_t seed) {
  model::ModelHyper h;
  h.lstm1_hidden = 12;
  h.lstm2_hidden = 10;
  h.horizon = 26;
  auto m = model::build_model(s, h, seed);
  m.target_stats = {31.25, 7.5, true};
  m.settings(model::Group::emg_branch) = {false, 0.1};
  m.preprocess.emg_lowpass_hz = 4.0;
  m.provenance = {"primary_train", "graft SIC->DIC"};
  // awkward values survive too
  auto& v = m.params.front().tensor.values;
  v[0] = -0.0;
  v[1] = 5e-324;
  v[2] = 1.7976931348623157e308;
  v[3] = 0.1;
  return m;
}

std::string put_u32(std::string bytes, std::size_t at, std::uint32_t value) {
  for (int i = 0; i < 4; ++i) bytes[at + i] = static_cast<char>((value >> (8 * i)) & 0xff);
  return bytes;
}

}  // namespace

TEST_CASE("checkpoint round trip is bit-exact") {
  for (Scenario s : {Scenario::SIC, Scenario::SIC_F, Scenario::DIC, Scenario::DIC_F}) {
    const auto m = sample_model(s, 3);
    const auto bytes = io::serialize_checkpoint(m);
    const auto back = io::deserialize_checkpoint(bytes);
    CHECK(back.scenario == m.scenario);
    CHECK(back.seed == m.seed);
    CHECK(back.hyper.horizon == 26);
    CHECK(back.hyper.lstm1_hidden == 12);
    REQUIRE(back.params.size() == m.params.size());
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      CHECK(back.params[i].name == m.params[i].name);
      CHECK(back.params[i].group == m.params[i].group);
      CHECK(back.params[i].tensor.shape == m.params[i].tensor.shape);
      CHECK(same_bits(back.params[i].tensor.values, m.params[i].tensor.values));
    }
    CHECK(std::signbit(back.params.front().tensor.values[0]));
    CHECK(back.target_stats.mean == 31.25);
    CHECK(back.target_stats.fitted);
    CHECK_FALSE(back.settings(model::Group::emg_branch).trainable);
    CHECK(back.settings(model::Group::emg_branch).lr_scale == 0.1);
    CHECK(back.preprocess.emg_lowpass_hz == 4.0);
    CHECK(back.provenance == m.provenance);
    CHECK(io::serialize_checkpoint(back) == bytes);
    CHECK(io::architecture_json(back) == io::architecture_json(m));
  }
}

TEST_CASE("checkpoint files") {
  testing::TempDir dir;
  const auto m = sample_model(Scenario::DIC, 9);
  const auto path = dir.path / "sub" / "model.ckpt";
  io::save_checkpoint(m, path);
  const auto back = io::load_checkpoint(path);
  CHECK(io::serialize_checkpoint(back) == io::serialize_checkpoint(m));
  CHECK(category_of([&] { io::load_checkpoint(dir.path / "missing.ckpt"); }) != "");
}

TEST_CASE("every truncation is reported as corruption") {
  const auto bytes = io::serialize_checkpoint(sample_model(Scenario::SIC_F, 1));
  testing::Gen g(5);
  std::vector<std::size_t> cuts{0, 1, 8, 12, 20, bytes.size() - 4, bytes.size() - 1};
  for (int i = 0; i < 200; ++i) cuts.push_back(g.index(0, bytes.size() - 1));
  for (auto cut : cuts) {
    INFO("cut at " << cut);
    CHECK(category_of([&] { io::deserialize_checkpoint(std::string_view(bytes).substr(0, cut)); }) == "corruption");
  }
}

TEST_CASE("flipped bits are caught by the checksum") {
  const auto bytes = io::serialize_checkpoint(sample_model(Scenario::SIC, 2));
  testing::Gen g(6);
  for (int i = 0; i < 200; ++i) {
    auto bad = bytes;
    const std::size_t at = g.index(12, bytes.size() - 1);  // past magic and version
    bad[at] = static_cast<char>(bad[at] ^ (1 << g.index(0, 7)));
    INFO("byte " << at);
    CHECK(category_of([&] { io::deserialize_checkpoint(bad); }) == "corruption");
  }
  auto extra = bytes + "x";
  CHECK(category_of([&] { io::deserialize_checkpoint(extra); }) == "corruption");
  auto magic = bytes;
  magic[0] = 'X';
  CHECK(category_of([&] { io::deserialize_checkpoint(magic); }) == "corruption");
}

TEST_CASE("other format versions ask for an upgrade") {
  const auto bytes = io::serialize_checkpoint(sample_model(Scenario::SIC, 2));
  const auto v2 = put_u32(bytes, 8, io::kCheckpointVersion + 1);
  try {
    io::deserialize_checkpoint(v2);
    FAIL("expected upgrade error");
  } catch (const DataError& e) {
    CHECK(e.category() == "upgrade");
    CHECK(std::string(e.what()).find("version 2") != std::string::npos);
  }
}

TEST_CASE("example cache round trip") {
  signal::PreprocessConfig cfg;
  cfg.window.stride_ms = 300;
  io::ExampleCache c;
  c.scenario = Scenario::DIC_F;
  c.horizon = 26;
  c.preprocess = cfg;
  c.examples = data::make_examples(data::synthesize_subject(testing::small_subject(4, 5)), c.scenario, 26, cfg);
  REQUIRE(c.examples.size() > 3);

  testing::TempDir dir;
  const auto path = dir.path / "ex.kcx";
  io::save_examples(c, path);
  CHECK(io::is_example_cache(path));
  const auto back = io::load_examples(path);
  CHECK(back.scenario == c.scenario);
  CHECK(back.horizon == 26);
  CHECK(back.preprocess.window.stride_ms == 300);
  REQUIRE(back.examples.size() == c.examples.size());
  for (std::size_t i = 0; i < c.examples.size(); ++i) {
    const auto& a = c.examples[i];
    const auto& b = back.examples[i];
    CHECK(same_bits(a.target, b.target));
    CHECK(same_bits(a.inputs.kinematic, b.inputs.kinematic));
    REQUIRE(a.inputs.emg.size() == b.inputs.emg.size());
    for (std::size_t ch = 0; ch < a.inputs.emg.size(); ++ch) CHECK(same_bits(a.inputs.emg[ch], b.inputs.emg[ch]));
    REQUIRE(b.inputs.forces.size() == 2);
    for (std::size_t ch = 0; ch < 2; ++ch) CHECK(same_bits(a.inputs.forces[ch], b.inputs.forces[ch]));
    CHECK(a.inputs.end_index == b.inputs.end_index);
    CHECK(a.inputs.kinematic_stats.std == b.inputs.kinematic_stats.std);
    CHECK(a.window_start == b.window_start);
    CHECK(a.end_time_ms == b.end_time_ms);
    CHECK(a.last_observed_deg == b.last_observed_deg);
    CHECK(a.subject_id == b.subject_id);
    CHECK(a.trial_id == b.trial_id);
  }
  CHECK(io::serialize_examples(back) == io::serialize_examples(c));

  const auto bytes = io::serialize_examples(c);
  for (std::size_t cut : {std::size_t{0}, std::size_t{10}, bytes.size() / 2, bytes.size() - 1}) {
    CHECK(category_of([&] { io::deserialize_examples(std::string_view(bytes).substr(0, cut)); }) == "corruption");
  }
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  CHECK(category_of([&] { io::deserialize_examples(flipped); }) == "corruption");

  std::ofstream(dir.path / "plain.csv") << "time_ms,emg_bf\n";
  CHECK_FALSE(io::is_example_cache(dir.path / "plain.csv"));
}

TEST_CASE("published schema matches the built-in copy") {
  std::ifstream in(std::string(KNEECAST_SOURCE_DIR) + "/docs/run_config.schema.json");
  REQUIRE(in.good());
  const auto file = nlohmann::json::parse(in);
  CHECK(file == nlohmann::json::parse(io::run_config_schema()));
}

TEST_CASE("schema violations name the offending path") {
  const auto schema = io::run_config_schema();
  CHECK(io::schema_violations(R"({})", schema).empty());
  CHECK(io::schema_violations(R"({"scenario": "DIC", "horizon": 50, "train": {"max_epochs": 60}})", schema).empty());

  struct Case {
    const char* doc;
    const char* fragment;
  } cases[] = {
      {R"({"scenario": "XIC"})", "/scenario"},
      {R"({"horizon": 3})", "/horizon"},
      {R"({"horizon": "1"})", "/horizon"},
      {R"({"seed": -1})", "/seed"},
      {R"({"filters": {"emg_lowpass_hz": 9}})", "/filters/emg_lowpass_hz"},
      {R"({"filters": {"emg_highpass_hz": 0}})", "/filters/emg_highpass_hz"},
      {R"({"train": {"beta1": 1.0}})", "/train/beta1"},
      {R"({"bogus": 1})", "bogus"},
      {R"({"model": {"conv1": {"filters": 8}}})", "/model/conv1: missing required field 'kernel'"},
      {R"({"data": {"pop": []}})", "/data/pop:"},
      {R"({"data": {"pop": [3]}})", "/data/pop/0"},
      {R"({"stages": [{"name": "a", "kind": "primary_train"}]})", "/stages/0: missing required field 'train'"},
      {R"({"stages": [{"name": "a", "kind": "x", "train": "t"}]})", "/stages/0/kind"},
      {R"([])", "/: expected object"},
  };
  for (const auto& c : cases) {
    INFO(std::string(c.doc));
    const auto v = io::schema_violations(c.doc, schema);
    REQUIRE_FALSE(v.empty());
    CHECK_MESSAGE(v.front().find(c.fragment) != std::string::npos, v.front());
  }
  CHECK(io::schema_violations(R"({"seed": -1, "horizon": 2, "bogus": 0})", schema).size() == 3);
}

TEST_CASE("run config parsing") {
  const auto rc = io::parse_run_config(R"({
    "scenario": "DIC_F", "horizon": 26, "seed": 11,
    "filters": {"emg_lowpass_hz": 4},
    "model": {"lstm1_hidden": 32},
    "train": {"max_epochs": 40, "lr_scale": 0.2},
    "split": {"kind": "half_half"},
    "data": {"pop": ["a.csv", "b.csv"], "subj": ["c.csv"]},
    "stages": [{"name": "s1", "kind": "primary_train", "train": "pop"}],
    "output_dir": "out"
  })");
  CHECK(rc.scenario == Scenario::DIC_F);
  CHECK(rc.horizon == 26);
  CHECK(rc.seed == 11);
  CHECK(rc.preprocess.emg_lowpass_hz == 4.0);
  CHECK(rc.hyper.lstm1_hidden == 32);
  CHECK(rc.hyper.lstm2_hidden == 48);
  CHECK(rc.train.max_epochs == 40);
  CHECK(rc.train.lr_scale == 0.2);
  CHECK(rc.split.kind == data::SplitKind::half_half);
  CHECK(rc.data.at("pop").size() == 2);
  REQUIRE(rc.stages.size() == 1);
  CHECK(rc.output_dir == "out");

  const auto defaults = io::parse_run_config("{}");
  CHECK(defaults.train.base_lr == 0.001);
  CHECK(defaults.train.patience == 5);

  try {
    io::parse_run_config(R"({"horizon": 2, "bogus": true})");
    FAIL("expected schema error");
  } catch (const ConfigError& e) {
    CHECK(e.category() == "schema");
    const std::string what = e.what();
    CHECK(what.find("horizon") != std::string::npos);
    CHECK(what.find("bogus") != std::string::npos);
  }
  CHECK(category_of([] { io::parse_run_config("{not json"); }) == "schema");
}

TEST_SUITE_END();
