#include "kneecast/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kneecast/data/splits.hpp"
#include "kneecast/data/synth.hpp"
#include "kneecast/error.hpp"
#include "kneecast/io/atomic_file.hpp"
#include "kneecast/io/checkpoint.hpp"
#include "kneecast/io/example_cache.hpp"
#include "kneecast/io/run_config.hpp"
#include "kneecast/metrics/metrics.hpp"
#include "kneecast/random.hpp"
#include "kneecast/train/stage_plan.hpp"
#include "kneecast/train/trainer.hpp"
#include "kneecast/train/transfer.hpp"

namespace kneecast {

namespace fs = std::filesystem;
using Examples = std::vector<data::PreprocessedExample>;

namespace {

std::string_view kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::config: return "config";
    case ErrorKind::data: return "data";
    case ErrorKind::numeric: return "numeric";
  }
  return "unknown";
}

void diagnose(std::ostream& err, int code, std::string_view kind, std::string_view category, std::string_view msg) {
  std::string flat(msg);
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  err << "error code=" << code << " kind=" << kind << " category=" << category
      << " message=" << nlohmann::json(flat).dump() << '\n';
}

/// Flags shared by the commands that build examples or models.
struct RunFlags {
  std::string config;
  std::optional<std::string> scenario;
  std::optional<int> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<int> stride_ms;
  std::optional<int> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr_scale;
  std::optional<double> base_lr;
  bool streaming = false;

  void add_to(CLI::App* app, bool training) {
    app->add_option("--config", config, "RunConfig JSON file");
    app->add_option("--scenario", scenario, "SIC, DIC, SIC_F or DIC_F");
    app->add_option("--horizon", horizon, "prediction horizon: 1, 26 or 50");
    app->add_option("--seed", seed, "seed for every random choice");
    app->add_option("--stride-ms", stride_ms, "hop between window starts in ms");
    app->add_flag("--streaming", streaming, "carry filter state across hops");
    if (training) {
      app->add_option("--epochs", epochs, "maximum epochs");
      app->add_option("--batch-size", batch_size, "mini-batch size");
      app->add_option("--lr-scale", lr_scale, "learning-rate scale: 1.0, 0.2 or 0.1");
      app->add_option("--base-lr", base_lr, "base learning rate");
    }
  }

  io::RunConfig resolve() const {
    io::RunConfig c = config.empty() ? io::RunConfig{} : io::load_run_config(config);
    if (scenario) c.scenario = parse_scenario(*scenario);
    if (horizon) c.horizon = *horizon;
    if (seed) {
      c.seed = *seed;
      c.train.seed = *seed;
      c.split.seed = *seed;
    }
    if (stride_ms) c.preprocess.window.stride_ms = *stride_ms;
    if (streaming) c.preprocess.streaming = true;
    if (epochs) c.train.max_epochs = *epochs;
    if (batch_size) c.train.batch_size = *batch_size;
    if (lr_scale) c.train.lr_scale = *lr_scale;
    if (base_lr) c.train.base_lr = *base_lr;
    c.hyper.horizon = c.horizon;
    c.hyper.input_length = c.preprocess.window.output_samples();
    c.preprocess.validate();
    c.hyper.validate();
    c.train.validate();
    return c;
  }
};

Examples load_dataset(const std::vector<std::string>& paths, Scenario scenario, int horizon,
                      const signal::PreprocessConfig& pc) {
  Examples out;
  for (const auto& p : paths) {
    if (!fs::exists(p)) throw DataError("input file not found: " + p, "io");
    if (io::is_example_cache(p)) {
      auto cache = io::load_examples(p);
      if (cache.scenario != scenario || cache.horizon != horizon) {
        throw ConfigError("example cache " + p + " holds " + std::string(to_string(cache.scenario)) + " H=" +
                              std::to_string(cache.horizon) + " examples, run needs " +
                              std::string(to_string(scenario)) + " H=" + std::to_string(horizon),
                          "scenario");
      }
      std::move(cache.examples.begin(), cache.examples.end(), std::back_inserter(out));
    } else {
      auto ex = data::make_examples(data::load_recording(p), scenario, horizon, pc);
      std::move(ex.begin(), ex.end(), std::back_inserter(out));
    }
  }
  return out;
}

std::vector<std::string> data_paths(const io::RunConfig& c, const std::vector<std::string>& flag,
                                    const std::string& key) {
  if (!flag.empty()) return flag;
  const auto it = c.data.find(key);
  return it == c.data.end() ? std::vector<std::string>{} : it->second;
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  fs::path q = p;
  q.replace_extension();
  return fs::path(q.string() + suffix);
}

void write_text(const fs::path& p, const std::string& text) { io::write_file_atomic(p, text); }

std::string summary(const train::TrainHistory& h) {
  std::ostringstream os;
  os << "epochs=" << h.epochs() << " best_epoch=" << h.best_epoch << " best_val_loss=" << h.best_val_loss
     << " stop=" << to_string(h.stop_reason);
  return os.str();
}

void check_expectations(const model::Model& m, const std::optional<std::string>& scenario,
                        const std::optional<int>& horizon) {
  if (scenario && parse_scenario(*scenario) != m.scenario) {
    throw ConfigError("checkpoint holds a " + std::string(to_string(m.scenario)) + " model but the run asks for " +
                          std::string(to_string(parse_scenario(*scenario))) +
                          "; use `kneecast transfer` to graft between scenarios",
                      "scenario");
  }
  if (horizon && *horizon != m.hyper.horizon) {
    throw ConfigError("checkpoint predicts horizon " + std::to_string(m.hyper.horizon) + " but the run asks for " +
                          std::to_string(*horizon),
                      "horizon");
  }
}

// ---------------------------------------------------------------- synth

struct SynthCmd {
  data::SynthSpec spec;
  std::string condition = "normal";
  std::optional<double> jitter;
  std::string output;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("synth", "write a seeded synthetic recording (CSV + JSON sidecar)");
    c->add_option("--cycles", spec.n_cycles, "gait cycles")->check(CLI::PositiveNumber);
    c->add_option("--period", spec.cycle_period_s, "mean cycle period in seconds (1.0-1.5)");
    c->add_option("--condition", condition, "normal or abnormal");
    c->add_option("--jitter", jitter, "per-cycle amplitude/period perturbation");
    c->add_option("--seed", spec.seed, "generator seed");
    c->add_flag("--forces", spec.include_forces, "include thigh/shank interaction forces");
    c->add_option("--subject", spec.subject_id, "subject identifier");
    c->add_option("--trial", spec.trial_id, "trial identifier");
    c->add_option("--a0", spec.a0, "mean knee angle (deg)");
    c->add_option("--a1", spec.a1, "first harmonic amplitude (deg)");
    c->add_option("--a2", spec.a2, "second harmonic amplitude (deg)");
    c->add_option("-o,--output", output, "output CSV path")->required();
  }

  int run(std::ostream& out) {
    spec.condition = data::parse_condition(condition);
    spec.jitter = jitter;
    const auto rec = data::synthesize_subject(spec);
    data::save_recording(rec, output);
    out << "wrote " << output << " (" << rec.size() << " samples)\n";
    return 0;
  }
};

// ---------------------------------------------------------------- preprocess

struct PreprocessCmd {
  RunFlags flags;
  std::vector<std::string> inputs;
  std::string output;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("preprocess", "window and preprocess recordings into an example cache");
    flags.add_to(c, false);
    c->add_option("inputs", inputs, "CSV recordings")->required();
    c->add_option("-o,--output", output, "cache path")->required();
  }

  int run(std::ostream& out) {
    const auto cfg = flags.resolve();
    io::ExampleCache cache;
    cache.scenario = cfg.scenario;
    cache.horizon = cfg.horizon;
    cache.preprocess = cfg.preprocess;
    for (const auto& p : inputs) {
      auto ex = data::make_examples(data::load_recording(p), cfg.scenario, cfg.horizon, cfg.preprocess);
      std::move(ex.begin(), ex.end(), std::back_inserter(cache.examples));
    }
    io::save_examples(cache, output);
    out << "wrote " << output << " (" << cache.examples.size() << " examples)\n";
    return 0;
  }
};

// ---------------------------------------------------------------- train

struct TrainCmd {
  RunFlags flags;
  std::vector<std::string> data, val_data;
  std::string output;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("train", "train a model or run the stage plan of a config");
    flags.add_to(c, true);
    c->add_option("--data", data, "training recordings or caches");
    c->add_option("--val-data", val_data, "validation recordings or caches (default: split of --data)");
    c->add_option("-o,--output", output, "checkpoint path");
  }

  int run_plan(const io::RunConfig& cfg, std::ostream& out) {
    train::StagePlan plan;
    plan.stages = cfg.stages;
    plan.hyper = cfg.hyper;
    plan.preprocess = cfg.preprocess;
    plan.train = cfg.train;
    plan.seed = cfg.seed;
    plan.checkpoint_dir = cfg.output_dir;
    // Scenario of the model a stage trains, following `from` links.
    std::map<std::string, const train::Stage*> by_name;
    for (const auto& s : cfg.stages) by_name[s.name] = &s;
    auto effective = [&](const train::Stage& start) {
      std::vector<const train::Stage*> chain{&start};
      while (!chain.back()->from.empty() && by_name.count(chain.back()->from) && chain.size() <= cfg.stages.size()) {
        chain.push_back(by_name.at(chain.back()->from));
      }
      Scenario sc = chain.back()->scenario.value_or(cfg.scenario);
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        if ((*it)->kind == train::StageKind::sic_to_dic) sc = uses_forces(sc) ? Scenario::DIC_F : Scenario::DIC;
      }
      int h = cfg.horizon;
      for (const auto* st : chain) {
        const bool builds = st->kind == train::StageKind::primary_train || st->kind == train::StageKind::sic_to_dic;
        if (builds && st->horizon) {
          h = *st->horizon;
          break;
        }
      }
      return std::make_pair(sc, h);
    };
    for (const auto& s : cfg.stages) {
      const auto [sc, h] = effective(s);
      for (const auto* ref : {&s.train_data, &s.validation_data, &s.eval_data}) {
        if (ref->empty() || plan.datasets.count(*ref)) continue;
        plan.datasets[*ref] = load_dataset(cfg.data.at(*ref), sc, h, cfg.preprocess);
      }
    }
    const auto artifacts = train::run_stage_plan(plan);
    for (const auto& a : artifacts) {
      write_text(fs::path(cfg.output_dir) / (a.stage + ".history.json"), train::to_json(a.history));
      if (a.metrics) {
        nlohmann::json j = nlohmann::json::parse(metrics::to_json(*a.metrics));
        if (a.zero_shot) j["zero_shot"] = nlohmann::json::parse(metrics::to_json(*a.zero_shot));
        write_text(fs::path(cfg.output_dir) / (a.stage + ".metrics.json"), j.dump(2));
      }
      if (a.graft) write_text(fs::path(cfg.output_dir) / (a.stage + ".graft.json"), train::to_json(*a.graft));
      out << "stage " << a.stage << ": " << summary(a.history);
      if (a.metrics) out << " nmae=" << a.metrics->nmae;
      out << " checkpoint=" << a.checkpoint.string() << '\n';
    }
    return 0;
  }

  int run(std::ostream& out) {
    const auto cfg = flags.resolve();
    if (!cfg.stages.empty() && data.empty()) return run_plan(cfg, out);
    const auto train_paths = data_paths(cfg, data, "train");
    if (train_paths.empty()) throw ConfigError("no training data: pass --data or list data.train in the config", "usage");
    Examples all = load_dataset(train_paths, cfg.scenario, cfg.horizon, cfg.preprocess);
    Examples train_set, val_set;
    const auto val_paths = data_paths(cfg, val_data, "validation");
    if (!val_paths.empty()) {
      train_set = std::move(all);
      val_set = load_dataset(val_paths, cfg.scenario, cfg.horizon, cfg.preprocess);
    } else {
      const auto split = data::split_examples(all, cfg.split);
      train_set = data::select(all, split.first);
      val_set = data::select(all, split.second);
    }
    auto model = model::build_model(cfg.scenario, cfg.hyper, derive_seed(cfg.seed, "model"));
    model.preprocess = cfg.preprocess;
    const auto history = train::train(model, train_set, val_set, cfg.train);
    model.provenance.push_back("primary_train:cli");
    const fs::path ckpt = output.empty() ? fs::path(cfg.output_dir) / "model.ckpt" : fs::path(output);
    io::save_checkpoint(model, ckpt);
    write_text(with_suffix(ckpt, ".history.json"), train::to_json(history));
    out << "trained " << to_string(cfg.scenario) << " H=" << cfg.horizon << " on " << train_set.size()
        << " examples: " << summary(history) << "\nwrote " << ckpt.string() << '\n';
    return 0;
  }
};

// ---------------------------------------------------------------- transfer

struct TransferCmd {
  RunFlags flags;
  std::string from;
  std::vector<std::string> data, val_data;
  std::string output;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("transfer", "graft a SIC checkpoint into a knee-history model and train it");
    flags.add_to(c, true);
    c->add_option("--from", from, "source checkpoint")->required();
    c->add_option("--data", data, "training recordings or caches");
    c->add_option("--val-data", val_data, "validation recordings or caches");
    c->add_option("-o,--output", output, "checkpoint path");
  }

  int run(std::ostream& out) {
    auto cfg = flags.resolve();
    const auto source = io::load_checkpoint(from);
    if (!flags.horizon && flags.config.empty()) cfg.horizon = cfg.hyper.horizon = source.hyper.horizon;
    model::ModelHyper hyper = source.hyper;
    hyper.horizon = cfg.horizon;
    auto g = train::transfer_sic_to_dic(source, hyper, derive_seed(cfg.seed, "transfer"));
    if (flags.scenario && parse_scenario(*flags.scenario) != g.model.scenario) {
      throw ConfigError("transfer from " + std::string(to_string(source.scenario)) + " produces " +
                            std::string(to_string(g.model.scenario)) + ", not " + *flags.scenario,
                        "scenario");
    }
    const auto train_paths = data_paths(cfg, data, "train");
    if (train_paths.empty()) throw ConfigError("no training data: pass --data", "usage");
    Examples all = load_dataset(train_paths, g.model.scenario, cfg.horizon, source.preprocess);
    Examples train_set, val_set;
    const auto val_paths = data_paths(cfg, val_data, "validation");
    if (!val_paths.empty()) {
      train_set = std::move(all);
      val_set = load_dataset(val_paths, g.model.scenario, cfg.horizon, source.preprocess);
    } else {
      const auto split = data::split_examples(all, cfg.split);
      train_set = data::select(all, split.first);
      val_set = data::select(all, split.second);
    }
    const auto history = train::train(g.model, train_set, val_set, cfg.train);
    g.model.provenance.push_back("sic_to_dic:cli");
    const fs::path ckpt = output.empty() ? fs::path(cfg.output_dir) / "transfer.ckpt" : fs::path(output);
    io::save_checkpoint(g.model, ckpt);
    write_text(with_suffix(ckpt, ".history.json"), train::to_json(history));
    write_text(with_suffix(ckpt, ".graft.json"), train::to_json(g.report));
    out << "grafted " << to_string(source.scenario) << " -> " << to_string(g.model.scenario) << ": "
        << g.report.copied.size() << " copied, " << g.report.reinitialized.size() << " reinitialized, "
        << g.report.fresh.size() << " fresh; " << summary(history) << "\nwrote " << ckpt.string() << '\n';
    return 0;
  }
};

// ---------------------------------------------------------------- finetune

struct FinetuneCmd {
  RunFlags flags;
  std::string from;
  std::vector<std::string> data, eval_data;
  std::string output;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("finetune", "adapt a checkpoint to new data at a reduced learning rate");
    flags.add_to(c, true);
    c->add_option("--from", from, "source checkpoint")->required();
    c->add_option("--data", data, "fine-tuning recordings (split 50/50 unless --eval-data is given)");
    c->add_option("--eval-data", eval_data, "evaluation recordings");
    c->add_option("-o,--output", output, "checkpoint path");
  }

  int run(std::ostream& out) {
    auto cfg = flags.resolve();
    if (!flags.lr_scale) cfg.train.lr_scale = 0.1;
    auto model = io::load_checkpoint(from);
    check_expectations(model, flags.scenario, flags.horizon);
    const int h = model.hyper.horizon;
    const auto paths = data_paths(cfg, data, "finetune");
    if (paths.empty()) throw ConfigError("no fine-tuning data: pass --data", "usage");
    Examples all = load_dataset(paths, model.scenario, h, model.preprocess);
    Examples ft, ev;
    const auto eval_paths = data_paths(cfg, eval_data, "eval");
    if (!eval_paths.empty()) {
      ft = std::move(all);
      ev = load_dataset(eval_paths, model.scenario, h, model.preprocess);
    } else {
      data::SplitPolicy policy;
      policy.kind = data::SplitKind::half_half;
      const auto split = data::split_examples(all, policy);
      ft = data::select(all, split.first);
      ev = data::select(all, split.second);
    }
    const auto r = train::finetune(model, ft, ev, cfg.train);
    model.provenance.push_back("subject_finetune:cli");
    const fs::path ckpt = output.empty() ? fs::path(cfg.output_dir) / "finetune.ckpt" : fs::path(output);
    io::save_checkpoint(model, ckpt);
    write_text(with_suffix(ckpt, ".history.json"), train::to_json(r.history));
    nlohmann::json j = nlohmann::json::parse(metrics::to_json(r.report));
    j["zero_shot"] = nlohmann::json::parse(metrics::to_json(r.zero_shot));
    write_text(with_suffix(ckpt, ".metrics.json"), j.dump(2));
    out << "fine-tuned at lr " << cfg.train.learning_rate() << ": zero-shot NMAE " << r.zero_shot.nmae
        << " -> NMAE " << r.report.nmae << "; " << summary(r.history) << "\nwrote " << ckpt.string() << '\n';
    return 0;
  }
};

// ---------------------------------------------------------------- eval

struct EvalCmd {
  std::string model_path;
  std::vector<std::string> data;
  std::optional<std::string> scenario;
  std::optional<int> horizon;
  std::optional<int> stride_ms;
  std::string report, plot;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("eval", "evaluate a checkpoint and write a metrics report");
    c->add_option("--model", model_path, "checkpoint")->required();
    c->add_option("--data", data, "evaluation recordings or caches")->required();
    c->add_option("--scenario", scenario, "expected scenario; a mismatch is an error");
    c->add_option("--horizon", horizon, "expected horizon; a mismatch is an error");
    c->add_option("--stride-ms", stride_ms, "hop between windows (default: the checkpoint's)");
    c->add_option("--report", report, "metrics JSON output");
    c->add_option("--plot", plot, "truth/prediction CSV output");
  }

  int run(std::ostream& out) {
    const auto model = io::load_checkpoint(model_path);
    check_expectations(model, scenario, horizon);
    auto pc = model.preprocess;
    if (stride_ms) pc.window.stride_ms = *stride_ms;
    const auto examples = load_dataset(data, model.scenario, model.hyper.horizon, pc);
    const auto e = metrics::evaluate_model(model, examples);
    if (!report.empty()) write_text(report, metrics::to_json(e));
    if (!plot.empty()) write_text(plot, metrics::plot_csv(examples, e.prediction));
    out << metrics::format_table(e);
    return 0;
  }
};

// ---------------------------------------------------------------- predict

struct PredictCmd {
  std::string model_path;
  std::string input;
  std::string output;
  std::optional<std::string> scenario;
  std::optional<int> horizon;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("predict", "stream causal predictions for a recording as CSV");
    c->add_option("--model", model_path, "checkpoint")->required();
    c->add_option("--input", input, "CSV recording")->required();
    c->add_option("-o,--output", output, "CSV output (default: standard output)");
    c->add_option("--scenario", scenario, "expected scenario; a mismatch is an error");
    c->add_option("--horizon", horizon, "expected horizon; a mismatch is an error");
  }

  int run(std::ostream& out) {
    const auto model = io::load_checkpoint(model_path);
    check_expectations(model, scenario, horizon);
    const auto rec = data::load_recording(input);
    const auto examples = data::make_examples(rec, model.scenario, 0, model.preprocess);
    std::ostringstream csv;
    const auto h = static_cast<std::size_t>(model.hyper.horizon);
    csv << "end_time_ms";
    for (std::size_t j = 1; j <= h; ++j) csv << ",pred_" << j;
    const bool attn = uses_kinematics(model.scenario);
    if (attn) {
      for (auto label : data::kEmgLabels) csv << ",attn_" << label;
    }
    csv << '\n';
    constexpr std::size_t kChunk = 256;
    char buf[32];
    for (std::size_t start = 0; start < examples.size(); start += kChunk) {
      const std::size_t n = std::min(kChunk, examples.size() - start);
      const auto p = model::forward(model, std::span(examples).subspan(start, n));
      for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%.0f", examples[start + i].end_time_ms);
        csv << buf;
        for (std::size_t j = 0; j < h; ++j) {
          std::snprintf(buf, sizeof buf, ",%.6f", p.at(i, j));
          csv << buf;
        }
        if (attn) {
          for (std::size_t c = 0; c < model::kEmgChannels; ++c) {
            double mean = 0.0;
            for (std::size_t t = 0; t < p.steps; ++t) mean += p.attention[(i * p.steps + t) * model::kEmgChannels + c];
            std::snprintf(buf, sizeof buf, ",%.6f", mean / static_cast<double>(p.steps));
            csv << buf;
          }
        }
        csv << '\n';
      }
    }
    if (output.empty()) {
      out << csv.str();
    } else {
      write_text(output, csv.str());
    }
    return 0;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"kneecast: EMG-driven knee-angle forecasting"};
  app.require_subcommand(1);
  SynthCmd synth;
  PreprocessCmd preprocess;
  TrainCmd train_cmd;
  TransferCmd transfer;
  FinetuneCmd finetune_cmd;
  EvalCmd eval;
  PredictCmd predict;
  synth.add(app);
  preprocess.add(app);
  train_cmd.add(app);
  transfer.add(app);
  finetune_cmd.add(app);
  eval.add(app);
  predict.add(app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    diagnose(err, 1, "config", "usage", e.what());
    return 1;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "synth") return synth.run(out);
    if (name == "preprocess") return preprocess.run(out);
    if (name == "train") return train_cmd.run(out);
    if (name == "transfer") return transfer.run(out);
    if (name == "finetune") return finetune_cmd.run(out);
    if (name == "eval") return eval.run(out);
    if (name == "predict") return predict.run(out);
    diagnose(err, 1, "config", "usage", "unknown subcommand " + name);
    return 1;
  } catch (const Error& e) {
    diagnose(err, e.exit_code(), kind_name(e.kind()), e.category(), e.what());
    return e.exit_code();
  } catch (const nlohmann::json::exception& e) {
    diagnose(err, 2, "data", "json", e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    diagnose(err, 2, "data", "io", e.what());
    return 2;
  } catch (const std::bad_alloc&) {
    diagnose(err, 3, "numeric", "memory", "out of memory");
    return 3;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace kneecast
