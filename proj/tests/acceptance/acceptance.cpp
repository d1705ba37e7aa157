// Prints one PASS/FAIL line per acceptance criterion. Usage:
//   kneecast_acceptance [criterion numbers...] [--seeds N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "../grad_cases.hpp"
#include "../oracle_values.hpp"
#include "../unit/support.hpp"
#include "kneecast/cli.hpp"
#include "kneecast/data/splits.hpp"
#include "kneecast/data/synth.hpp"
#include "kneecast/error.hpp"
#include "kneecast/io/checkpoint.hpp"
#include "kneecast/metrics/metrics.hpp"
#include "kneecast/signal/butterworth.hpp"
#include "kneecast/signal/preprocess.hpp"
#include "kneecast/train/early_stopping.hpp"
#include "kneecast/train/stage_plan.hpp"
#include "kneecast/train/trainer.hpp"

using namespace kneecast;
using Examples = std::vector<data::PreprocessedExample>;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok " : "FAILED ") + what);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Reduced network used for every training run here; the full-size default
// is too slow for a sub-10-minute desk run on one core.
model::ModelHyper desk_hyper(int horizon) {
  model::ModelHyper h;
  h.conv1.filters = 4;
  h.conv2.filters = 8;
  h.emg_feature_dim = 8;
  h.lstm1_hidden = 16;
  h.lstm2_hidden = 16;
  h.kin_lstm_hidden = 8;
  h.attn_dim = 8;
  h.force_feature_dim = 8;
  h.horizon = horizon;
  return h;
}

data::SynthSpec subject(int k, std::uint64_t seed, int cycles, const std::string& trial) {
  data::SynthSpec s;
  s.n_cycles = cycles;
  s.include_forces = true;
  s.seed = seed;
  s.trial_id = trial;
  s.subject_id = "s" + std::to_string(k);
  switch (k) {
    case 1:
      s.a0 = 32;
      s.a1 = 22;
      s.a2 = 12;
      s.cycle_period_s = 1.1;
      s.emg_gain_mv = {0.4, 0.6, 0.5, 0.45};
      break;
    case 2:
      s.a0 = 28;
      s.a1 = 27;
      s.a2 = 9;
      s.cycle_period_s = 1.3;
      s.emg_gain_mv = {0.55, 0.45, 0.6, 0.5};
      break;
    default:  // the unseen subject
      s.a0 = 36;
      s.a1 = 20;
      s.a2 = 14;
      s.psi = 1.1;
      s.cycle_period_s = 1.4;
      s.emg_gain_mv = {0.35, 0.7, 0.4, 0.6};
      s.emg_phase = {0.10, 0.35, 0.50, 0.85};
      break;
  }
  return s;
}

Examples examples_of(const std::vector<data::Recording>& recs, Scenario sc, int h, const signal::PreprocessConfig& pc) {
  Examples out;
  for (const auto& r : recs) {
    auto e = data::make_examples(r, sc, h, pc);
    std::move(e.begin(), e.end(), std::back_inserter(out));
  }
  return out;
}

// ------------------------------------------------------------------ 1

Outcome gradient_integrity() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string worst_name;
  int failed = 0, total = 0;
  for (const auto& [name, build] : grad_cases::primitives()) {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      const auto r = grad_cases::check_primitive(build, seed);
      ++total;
      if (!r.passed) ++failed;
      if (r.max_rel_error > worst) {
        worst = r.max_rel_error;
        worst_name = name;
      }
    }
  }
  double worst_dic = 0.0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto r = grad_cases::check_tiny_dic(seed);
    ++total;
    if (!r.passed) ++failed;
    worst_dic = std::max(worst_dic, r.max_rel_error);
  }
  const double dt = seconds_since(t0);
  o.require(failed == 0, fmt("%d/%d checks within 1e-4", total - failed, total));
  o.require(worst <= 1e-4, fmt("worst primitive %s %.2e", worst_name.c_str(), worst));
  o.require(worst_dic <= 1e-4, fmt("worst tiny DIC %.2e", worst_dic));
  o.require(dt < 60.0, fmt("%.1fs", dt));
  return o;
}

// ------------------------------------------------------------------ 2

Outcome preprocessing_fidelity() {
  Outcome o;
  signal::PreprocessConfig cfg;
  testing::Gen g(2);
  const auto rec = data::synthesize_subject(testing::small_subject(21, 12, true));

  std::vector<std::vector<double>> raw(4);
  for (std::size_t ch = 0; ch < 4; ++ch) raw[ch].assign(rec.emg[ch].begin(), rec.emg[ch].begin() + 2000);
  raw.emplace_back(rec.knee_angle_deg.begin(), rec.knee_angle_deg.begin() + 2000);
  std::vector<signal::ChannelKind> kinds(4, signal::ChannelKind::emg);
  kinds.push_back(signal::ChannelKind::kinematic);
  const auto w = signal::preprocess_window(raw, kinds, cfg);
  bool sizes = w.kinematic.size() == 200;
  for (const auto& ch : w.emg) sizes = sizes && ch.size() == 200;
  o.require(sizes, "2000-sample windows reduce to 200 samples");

  std::vector<std::vector<double>> flat(5, std::vector<double>(2000, 0.0));
  for (std::size_t ch = 0; ch < 5; ++ch) std::fill(flat[ch].begin(), flat[ch].end(), g.real(-50.0, 50.0));
  const auto z = signal::preprocess_window(flat, kinds, cfg);
  bool zeros = std::all_of(z.kinematic.begin(), z.kinematic.end(), [](double v) { return v == 0.0; });
  for (const auto& ch : z.emg) zeros = zeros && std::all_of(ch.begin(), ch.end(), [](double v) { return v == 0.0; });
  o.require(zeros, "constant inputs map to zeros");

  // Causality on 100 random windows: the filters never look ahead, and an
  // example never depends on samples after its window end.
  int causal = 0;
  const auto base = data::make_examples(rec, Scenario::DIC_F, 1, cfg);
  for (int trial = 0; trial < 100; ++trial) {
    const auto& pick = base[g.index(0, base.size() - 2)];
    const auto ch = g.index(0, 3);
    std::vector<double> x(rec.emg[ch].begin() + static_cast<std::ptrdiff_t>(pick.window_start),
                          rec.emg[ch].begin() + static_cast<std::ptrdiff_t>(pick.window_start) + 2000);
    auto y = x;
    const std::size_t cut = g.index(0, 1998);
    for (std::size_t k = cut + 1; k < y.size(); ++k) y[k] = g.real(-1.0, 1.0);
    const auto a = signal::condition_channel(x, signal::ChannelKind::emg, cfg);
    const auto b = signal::condition_channel(y, signal::ChannelKind::emg, cfg);
    bool same = std::equal(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(cut) + 1, b.begin());

    auto future = rec;
    for (std::size_t k = pick.inputs.end_index + 1; k < future.size(); ++k) {
      future.knee_angle_deg[k] += g.real(-10.0, 10.0);
      future.emg[ch][k] = g.real(-1.0, 1.0);
      (*future.force_thigh_n)[k] += g.real(-5.0, 5.0);
    }
    const auto moved = data::make_examples(future, Scenario::DIC_F, 1, cfg);
    for (std::size_t i = 0; i < base.size() && base[i].inputs.end_index <= pick.inputs.end_index; ++i) {
      same = same && moved[i].inputs.emg == base[i].inputs.emg && moved[i].inputs.kinematic == base[i].inputs.kinematic &&
             moved[i].inputs.forces == base[i].inputs.forces;
    }
    if (same) ++causal;
  }
  o.require(causal == 100, fmt("causality perturbation %d/100 windows", causal));

  double worst = 0.0;
  for (std::size_t ch = 0; ch < 4; ++ch) {
    for (std::size_t start : {std::size_t{0}, std::size_t{4000}, std::size_t{9000}}) {
      std::vector<double> x(rec.emg[ch].begin() + start, rec.emg[ch].begin() + start + 2000);
      const auto env = signal::condition_channel(x, signal::ChannelKind::emg, cfg);
      worst = std::max(worst, testing::power_fraction_above(env, 1000.0, 30.0));
    }
  }
  o.require(worst < 0.01, fmt("pre-decimation EMG power above 30 Hz %.4f%%", 100.0 * worst));

  double worst_3db = 0.0;
  for (int order = 1; order <= 6; ++order) {
    for (double fc : {3.0, 5.0, 6.0, 20.0}) {
      const auto lp = signal::design_butterworth({signal::FilterKind::low_pass, order, fc, 1000.0});
      const auto hp = signal::design_butterworth({signal::FilterKind::high_pass, order, fc, 1000.0});
      worst_3db = std::max({worst_3db, std::abs(lp.gain(fc, 1000.0) - M_SQRT1_2), std::abs(hp.gain(fc, 1000.0) - M_SQRT1_2)});
    }
  }
  o.require(worst_3db < 1e-3, fmt("-3 dB point off by %.1e", worst_3db));
  return o;
}

// ------------------------------------------------------------------ 3

Outcome parameter_budget() {
  Outcome o;
  const Scenario order[] = {Scenario::SIC, Scenario::SIC_F, Scenario::DIC, Scenario::DIC_F};
  const std::pair<int, const long*> expected[] = {
      {1, oracle::kParamsH1}, {26, oracle::kParamsH26}, {50, oracle::kParamsH50}};
  for (const auto& [h, oracle_counts] : expected) {
    model::ModelHyper hyper;
    hyper.horizon = h;
    std::size_t prev = 0;
    std::string line = fmt("H=%d:", h);
    bool ok = true;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto n = model::count_parameters(model::build_model(order[i], hyper, 1)).total;
      line += fmt(" %s %zu", std::string(to_string(order[i])).c_str(), n);
      ok = ok && static_cast<long>(n) == oracle_counts[i] && n < 100000 && n > prev;
      prev = n;
    }
    o.require(ok, line + " (oracle match, < 100000, strictly increasing)");
  }
  return o;
}

// ------------------------------------------------------------------ 4

struct OrderingRun {
  double sic1, sic50, dic1, dic50, dicf1, dicf50;
};

double train_and_eval(Scenario sc, int h, const std::vector<data::Recording>& train_recs,
                      const std::vector<data::Recording>& eval_recs, std::uint64_t seed) {
  signal::PreprocessConfig pc;
  pc.window.stride_ms = 120;
  const auto all = examples_of(train_recs, sc, h, pc);
  const auto eval = examples_of(eval_recs, sc, h, pc);
  const auto split = data::split_examples(all, {});
  const auto tr = data::select(all, split.first), va = data::select(all, split.second);
  auto m = model::build_model(sc, desk_hyper(h), seed);
  train::TrainConfig tc;
  tc.batch_size = 32;
  tc.max_epochs = 15;
  tc.base_lr = 1e-2;
  tc.seed = seed;
  train::train(m, tr, va, tc);
  return metrics::evaluate_model(m, eval).model.nmae;
}

Outcome qualitative_orderings(int n_seeds) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<OrderingRun> runs;
  for (int s = 0; s < n_seeds; ++s) {
    const std::uint64_t seed = 100 + static_cast<std::uint64_t>(s);
    std::vector<data::Recording> tr, ev;
    for (int k = 1; k <= 2; ++k) {
      tr.push_back(data::synthesize_subject(subject(k, seed * 10 + k, 40, "1")));
      ev.push_back(data::synthesize_subject(subject(k, seed * 10 + k + 5, 12, "2")));
    }
    OrderingRun r{};
    r.sic1 = train_and_eval(Scenario::SIC, 1, tr, ev, seed);
    r.sic50 = train_and_eval(Scenario::SIC, 50, tr, ev, seed);
    r.dic1 = train_and_eval(Scenario::DIC, 1, tr, ev, seed);
    r.dic50 = train_and_eval(Scenario::DIC, 50, tr, ev, seed);
    r.dicf1 = train_and_eval(Scenario::DIC_F, 1, tr, ev, seed);
    r.dicf50 = train_and_eval(Scenario::DIC_F, 50, tr, ev, seed);
    std::printf("  seed %llu: SIC %.4f/%.4f DIC %.4f/%.4f DIC_F %.4f/%.4f (H1/H50 NMAE)\n",
                static_cast<unsigned long long>(seed), r.sic1, r.sic50, r.dic1, r.dic50, r.dicf1, r.dicf50);
    std::fflush(stdout);
    runs.push_back(r);
  }
  const int need = (4 * n_seeds + 4) / 5;  // 4 of 5
  auto tally = [&](const char* what, auto holds) {
    int n = 0;
    for (const auto& r : runs) n += holds(r) ? 1 : 0;
    o.require(n >= need, fmt("%s on %d/%d seeds", what, n, n_seeds));
  };
  tally("DIC <= SIC at H1", [](const OrderingRun& r) { return r.dic1 <= r.sic1; });
  tally("DIC <= SIC at H50", [](const OrderingRun& r) { return r.dic50 <= r.sic50; });
  tally("H1 <= H50 for SIC", [](const OrderingRun& r) { return r.sic1 <= r.sic50; });
  tally("H1 <= H50 for DIC", [](const OrderingRun& r) { return r.dic1 <= r.dic50; });
  tally("H1 <= H50 for DIC_F", [](const OrderingRun& r) { return r.dicf1 <= r.dicf50; });
  tally("DIC_F <= DIC at H1", [](const OrderingRun& r) { return r.dicf1 <= r.dic1; });
  tally("DIC_F <= DIC at H50", [](const OrderingRun& r) { return r.dicf50 <= r.dic50; });
  const double dt = seconds_since(t0);
  o.require(dt < 600.0, fmt("%.0fs", dt));
  return o;
}

// ------------------------------------------------------------------ 5

Outcome transfer_efficacy() {
  Outcome o;
  const std::uint64_t seed = 500;
  signal::PreprocessConfig pop_pc;
  pop_pc.window.stride_ms = 120;
  std::vector<data::Recording> pop;
  for (int k = 1; k <= 2; ++k) pop.push_back(data::synthesize_subject(subject(k, seed + k, 40, "1")));
  const auto all = examples_of(pop, Scenario::DIC, 1, pop_pc);
  const auto split = data::split_examples(all, {});
  auto base = model::build_model(Scenario::DIC, desk_hyper(1), seed);
  train::TrainConfig tc;
  tc.batch_size = 32;
  tc.max_epochs = 15;
  tc.base_lr = 1e-2;
  tc.seed = seed;
  train::train(base, data::select(all, split.first), data::select(all, split.second), tc);

  signal::PreprocessConfig pc;  // default 40 ms hop for the scarce subject data
  struct Case {
    const char* label;
    data::Condition condition;
    int cycles;
  } cases[] = {{"normal, 3 cycles", data::Condition::normal, 3}, {"abnormal, 7 cycles", data::Condition::abnormal, 7}};
  for (const auto& c : cases) {
    auto ft_spec = subject(3, seed + 30 + static_cast<std::uint64_t>(c.cycles), c.cycles, "ft");
    ft_spec.condition = c.condition;
    auto ev_spec = subject(3, seed + 40 + static_cast<std::uint64_t>(c.cycles), 10, "eval");
    ev_spec.condition = c.condition;
    const auto ft = examples_of({data::synthesize_subject(ft_spec)}, Scenario::DIC, 1, pc);
    const auto ev = examples_of({data::synthesize_subject(ev_spec)}, Scenario::DIC, 1, pc);
    auto m = base;
    train::TrainConfig f = tc;
    f.lr_scale = 0.1;
    f.batch_size = 8;
    const auto r = train::finetune(m, ft, ev, f);
    const double gain = 1.0 - r.report.nmae / r.zero_shot.nmae;
    o.require(gain >= 0.10, fmt("%s: zero-shot NMAE %.4f -> %.4f (%.1f%% lower, %zu examples)", c.label,
                                r.zero_shot.nmae, r.report.nmae, 100.0 * gain, ft.size()));
    const auto e = metrics::evaluate_model(m, ev);
    o.require(e.model.nmae < e.persistence.nmae,
              fmt("%s: DIC H1 NMAE %.4f vs persistence %.4f", c.label, e.model.nmae, e.persistence.nmae));
  }
  return o;
}

// ------------------------------------------------------------------ 6

Outcome stopping_and_rates() {
  Outcome o;
  // Injected validation losses through fit(); the gradient is a no-op.
  auto run = [](const std::vector<double>& losses, int patience) {
    model::Model m;
    m.params.push_back({"w", model::Group::head, ad::Tensor({1}, {0.0}, true)});
    train::Problem p;
    p.n_train = 4;
    p.gradient = [&](std::span<const std::size_t>) {
      m.params[0].tensor.grad = {1.0};
      return 1.0;
    };
    p.train_loss = [] { return 1.0; };
    // the first call is the pre-training loss
    std::vector<double> seq{1e9};
    seq.insert(seq.end(), losses.begin(), losses.end());
    p.validation_loss = [seq, k = std::size_t{0}]() mutable { return seq[std::min(k++, seq.size() - 1)]; };
    train::TrainConfig cfg;
    cfg.patience = patience;
    cfg.max_epochs = static_cast<int>(losses.size());
    return train::fit(m, p, cfg);
  };
  const auto h = run({1.0, 0.9, 0.91, 0.92, 0.93, 0.94, 0.95, 0.1}, 5);
  o.require(h.epochs() == 7 && h.best_epoch == 2 && h.stop_reason == train::StopReason::early_stop,
            fmt("documented sequence stops after epoch %zu with best epoch %d", h.epochs(), h.best_epoch));

  testing::Gen g(6);
  int agree = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> losses(g.index(1, 30));
    for (auto& l : losses) l = std::round(g.real(0.0, 6.0)) / 3.0;
    // reference: stop once `patience` epochs pass without a strict improvement
    double best = INFINITY;
    std::size_t best_epoch = 0, stop = losses.size();
    for (std::size_t e = 1; e <= losses.size(); ++e) {
      if (losses[e - 1] < best) {
        best = losses[e - 1];
        best_epoch = e;
      }
      if (e - best_epoch >= 5) {
        stop = e;
        break;
      }
    }
    const auto r = run(losses, 5);
    if (r.epochs() == stop && static_cast<std::size_t>(r.best_epoch) == best_epoch) ++agree;
  }
  o.require(agree == 300, fmt("patience-5 rule matches the reference on %d/300 random sequences", agree));

  auto rec = data::synthesize_subject(testing::small_subject(61, 6, false));
  const auto ex = data::make_examples(rec, Scenario::DIC, 1, {});
  const auto sp = data::split_examples(ex, {data::SplitKind::half_half});
  const auto ft = data::select(ex, sp.first), ev = data::select(ex, sp.second);
  const std::pair<double, double> expected[] = {{0.1, 0.0001}, {0.2, 0.0005}};
  for (const auto& [scale, want] : expected) {
    auto m = model::build_model(Scenario::DIC, desk_hyper(1), 3);
    train::TrainConfig cfg;
    cfg.lr_scale = scale;
    cfg.max_epochs = 2;
    const auto r = train::finetune(m, ft, ev, cfg);
    const bool ok = !r.history.learning_rate.empty() &&
                    std::all_of(r.history.learning_rate.begin(), r.history.learning_rate.end(),
                                [&](double lr) { return std::abs(lr - want) < 1e-15; });
    o.require(ok, fmt("lr_scale %.1f records lr %g (expected %g)", scale,
                      r.history.learning_rate.empty() ? NAN : r.history.learning_rate.front(), want));
  }
  return o;
}

// ------------------------------------------------------------------ 7

std::string pipeline_once() {
  testing::TempDir dir;
  std::ostringstream out, err;
  const auto csv = (dir.path / "s.csv").string(), ckpt = (dir.path / "m.ckpt").string();
  const auto report = (dir.path / "r.json").string();
  auto cli = [&](std::vector<std::string> args) {
    if (run_cli(args, out, err) != 0) throw std::runtime_error("cli failed: " + err.str());
  };
  cli({"synth", "--cycles", "10", "--seed", "77", "--forces", "-o", csv});
  cli({"train", "--scenario", "DIC_F", "--horizon", "26", "--seed", "3", "--stride-ms", "200", "--epochs", "2",
       "--batch-size", "16", "--data", csv, "-o", ckpt});
  cli({"eval", "--model", ckpt, "--data", csv, "--report", report});
  std::ifstream a(report), b(ckpt, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(a), {}) + std::string(std::istreambuf_iterator<char>(b), {});
}

Outcome determinism() {
  Outcome o;
  o.require(pipeline_once() == pipeline_once(), "synth -> train -> eval run twice gives identical report and checkpoint");

  bool exact = true;
  testing::Gen g(7);
  for (Scenario s : {Scenario::SIC, Scenario::SIC_F, Scenario::DIC, Scenario::DIC_F}) {
    auto m = model::build_model(s, {}, 9);
    for (auto& p : m.params)
      for (auto& v : p.tensor.values) v = g.real(-1.0, 1.0) * std::pow(10.0, g.real(-300.0, 300.0));
    const auto back = io::deserialize_checkpoint(io::serialize_checkpoint(m));
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      const auto& a = m.params[i].tensor.values;
      const auto& b = back.params[i].tensor.values;
      exact = exact && a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
    }
  }
  o.require(exact, "checkpoint round trips are bit-exact for all four scenarios");

  auto rec = data::synthesize_subject(testing::small_subject(71, 8, true));
  signal::PreprocessConfig pc;
  pc.window.stride_ms = 200;
  const auto ex = data::make_examples(rec, Scenario::DIC_F, 1, pc);
  auto m = model::build_model(Scenario::DIC_F, desk_hyper(1), 4);
  const auto before = m;
  model::set_group_training(m, model::Group::emg_branch, false, 1.0);
  model::set_group_training(m, model::Group::force_branch, false, 1.0);
  train::TrainConfig cfg;
  cfg.max_epochs = 3;
  cfg.batch_size = 8;
  train::train(m, ex, {}, cfg);
  std::size_t frozen = 0, moved = 0;
  bool identical = true;
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    const bool is_frozen = !m.settings(m.params[i].group).trainable;
    const bool same = m.params[i].tensor.values == before.params[i].tensor.values;
    if (is_frozen) {
      ++frozen;
      identical = identical && same;
    } else if (!same) {
      ++moved;
    }
  }
  o.require(identical && frozen > 0 && moved > 0,
            fmt("%zu frozen tensors bit-identical after training, %zu trainable tensors moved", frozen, moved));
  return o;
}

// ------------------------------------------------------------------ 8

Outcome metric_correctness() {
  Outcome o;
  std::vector<double> truth(120);
  for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = 10.0 + static_cast<double>(i % 41);
  const auto perfect = metrics::evaluate_metrics(truth, truth, 60, 2);
  o.require(perfect.nmae == 0.0 && perfect.nrmse == 0.0 && perfect.r2 == 1.0, "perfect prediction: 0, 0, 1");
  auto shifted = truth;
  for (auto& v : shifted) v += 2.0;
  const auto offset = metrics::evaluate_metrics(shifted, truth, 60, 2);
  o.require(offset.nmae == 0.05 && offset.nrmse == 0.05 && offset.r2 < 1.0,
            fmt("+2 deg over a 40 deg range: nmae %.17g nrmse %.17g", offset.nmae, offset.nrmse));
  std::vector<double> t2{10.0, 20.0, 30.0, 40.0, 50.0, 30.0}, mean_pred(6, 30.0);
  o.require(metrics::evaluate_metrics(mean_pred, t2, 3, 2).r2 == 0.0, "mean predictor: r2 = 0");

  testing::Gen g(8);
  int ok = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = g.index(2, 50), h = g.index(1, 5);
    auto t = g.normals(n * h, g.real(0.1, 40.0));
    t[0] += 1.0;
    auto p = g.normals(n * h, g.real(0.1, 40.0));
    const auto r = metrics::evaluate_metrics(p, t, n, h);
    if (r.nrmse >= r.nmae) ++ok;
  }
  o.require(ok == 1000, fmt("NRMSE >= NMAE on %d/1000 random instances", ok));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int n_seeds = 5;
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--seeds") == 0 && i + 1 < argc) {
      n_seeds = std::atoi(argv[++i]);
    } else {
      selected.push_back(std::atoi(argv[i]));
    }
  }
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient integrity", gradient_integrity},
      {"preprocessing fidelity", preprocessing_fidelity},
      {"parameter budget", parameter_budget},
      {"qualitative orderings", [&] { return qualitative_orderings(n_seeds); }},
      {"transfer efficacy", transfer_efficacy},
      {"early stopping and learning rates", stopping_and_rates},
      {"determinism and persistence", determinism},
      {"metric correctness", metric_correctness},
  };

  int failures = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    const auto& [title, check] = criteria[static_cast<std::size_t>(id - 1)];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.require(false, std::string("threw: ") + e.what());
    }
    std::string detail;
    for (const auto& n : o.notes) detail += (detail.empty() ? "" : "; ") + n;
    std::printf("criterion %d %s: %s (%.0fs) %s\n", id, o.pass ? "PASS" : "FAIL", title, seconds_since(t0),
                detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
