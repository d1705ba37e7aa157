#include "kneecast/train/stage_plan.hpp"

#include <algorithm>
#include <set>

#include "kneecast/error.hpp"
#include "kneecast/io/checkpoint.hpp"
#include "kneecast/random.hpp"

namespace kneecast::train {

std::string_view to_string(StageKind k) {
  switch (k) {
    case StageKind::primary_train: return "primary_train";
    case StageKind::sic_to_dic: return "sic_to_dic";
    case StageKind::population_adapt: return "population_adapt";
    case StageKind::subject_finetune: return "subject_finetune";
  }
  return "?";
}

StageKind parse_stage_kind(std::string_view name) {
  for (StageKind k : {StageKind::primary_train, StageKind::sic_to_dic, StageKind::population_adapt,
                      StageKind::subject_finetune}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown stage kind '" + std::string(name) + "'", "plan");
}

namespace {

const std::vector<data::PreprocessedExample>& dataset(const StagePlan& plan, const Stage& s, const std::string& name) {
  const auto it = plan.datasets.find(name);
  if (it == plan.datasets.end()) {
    throw ConfigError("stage '" + s.name + "' references unknown data set '" + name + "'", "plan");
  }
  return it->second;
}

void check_leakage(const StagePlan& plan, const Stage& s) {
  if (s.eval_data.empty()) return;
  std::set<std::string> gradient_keys;
  for (const auto* name : {&s.train_data, &s.validation_data}) {
    if (name->empty()) continue;
    for (const auto& ex : dataset(plan, s, *name)) gradient_keys.insert(data::example_key(ex));
  }
  std::size_t leaked = 0;
  std::string first;
  for (const auto& ex : dataset(plan, s, s.eval_data)) {
    const auto key = data::example_key(ex);
    if (gradient_keys.count(key)) {
      if (leaked++ == 0) first = key;
    }
  }
  if (leaked > 0) {
    throw ConfigError("stage '" + s.name + "': " + std::to_string(leaked) +
                          " evaluation example(s) also appear in training data, first " + first,
                      "leakage");
  }
}

}  // namespace

std::vector<std::size_t> validate_plan(const StagePlan& plan) {
  if (plan.stages.empty()) throw ConfigError("stage plan is empty", "plan");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < plan.stages.size(); ++i) {
    const auto& s = plan.stages[i];
    if (s.name.empty()) throw ConfigError("stage #" + std::to_string(i) + " has no name", "plan");
    if (!index.emplace(s.name, i).second) throw ConfigError("duplicate stage name '" + s.name + "'", "plan");
  }
  for (const auto& s : plan.stages) {
    if (s.kind == StageKind::primary_train && !s.from.empty()) {
      throw ConfigError("primary_train stage '" + s.name + "' cannot start from another stage", "plan");
    }
    if (s.kind != StageKind::primary_train) {
      if (s.from.empty()) throw ConfigError("stage '" + s.name + "' needs a 'from' stage", "plan");
      if (!index.count(s.from)) {
        throw ConfigError("stage '" + s.name + "' starts from unknown stage '" + s.from + "'", "plan");
      }
    }
    if (s.train_data.empty()) throw ConfigError("stage '" + s.name + "' has no training data", "plan");
    dataset(plan, s, s.train_data);
    if (!s.validation_data.empty()) dataset(plan, s, s.validation_data);
    if (s.kind == StageKind::subject_finetune && s.eval_data.empty()) {
      throw ConfigError("subject_finetune stage '" + s.name + "' needs evaluation data", "plan");
    }
  }

  // Depth-first topological order; each stage has at most one parent.
  std::vector<std::size_t> order;
  std::vector<int> state(plan.stages.size(), 0);  // 0 new, 1 visiting, 2 done
  auto visit = [&](auto&& self, std::size_t i) -> void {
    if (state[i] == 2) return;
    if (state[i] == 1) throw ConfigError("stage plan has a cycle through '" + plan.stages[i].name + "'", "plan");
    state[i] = 1;
    if (!plan.stages[i].from.empty()) self(self, index.at(plan.stages[i].from));
    state[i] = 2;
    order.push_back(i);
  };
  for (std::size_t i = 0; i < plan.stages.size(); ++i) visit(visit, i);

  for (const auto& s : plan.stages) check_leakage(plan, s);
  return order;
}

std::vector<StageArtifact> run_stage_plan(const StagePlan& plan) {
  const auto order = validate_plan(plan);
  std::map<std::string, std::size_t> produced;
  std::vector<StageArtifact> artifacts;
  for (std::size_t i : order) {
    const Stage& s = plan.stages[i];
    StageArtifact a;
    a.stage = s.name;
    model::ModelHyper hyper = plan.hyper;
    if (s.horizon) hyper.horizon = *s.horizon;
    const std::uint64_t stage_seed = derive_seed(plan.seed, "stage:" + s.name);

    switch (s.kind) {
      case StageKind::primary_train:
        a.model = model::build_model(s.scenario.value_or(Scenario::SIC), hyper, stage_seed);
        a.model.preprocess = plan.preprocess;
        break;
      case StageKind::sic_to_dic: {
        const auto& parent = artifacts[produced.at(s.from)].model;
        auto g = transfer_sic_to_dic(parent, hyper, stage_seed);
        a.model = std::move(g.model);
        a.graft = std::move(g.report);
        break;
      }
      case StageKind::population_adapt:
      case StageKind::subject_finetune:
        a.model = artifacts[produced.at(s.from)].model;
        break;
    }
    for (model::Group g : s.frozen) a.model.settings(g).trainable = false;

    TrainConfig cfg = plan.train;
    cfg.lr_scale = s.lr_scale;
    cfg.seed = derive_seed(plan.seed, "train:" + s.name);
    if (s.max_epochs) cfg.max_epochs = *s.max_epochs;
    const auto& train_set = dataset(plan, s, s.train_data);
    static const std::vector<data::PreprocessedExample> kNone;
    const auto& val_set = s.validation_data.empty() ? kNone : dataset(plan, s, s.validation_data);

    if (s.kind == StageKind::subject_finetune) {
      auto r = finetune(a.model, train_set, dataset(plan, s, s.eval_data), cfg);
      a.history = std::move(r.history);
      a.metrics = r.report;
      a.zero_shot = r.zero_shot;
    } else {
      a.history = train(a.model, train_set, val_set, cfg);
      if (!s.eval_data.empty()) a.metrics = metrics::evaluate_model(a.model, dataset(plan, s, s.eval_data)).model;
    }
    a.model.provenance.push_back(std::string(to_string(s.kind)) + ":" + s.name);
    for (model::Group g : s.frozen) a.model.settings(g).trainable = true;
    if (!plan.checkpoint_dir.empty()) {
      a.checkpoint = plan.checkpoint_dir / (s.name + ".ckpt");
      io::save_checkpoint(a.model, a.checkpoint);
    }
    produced[s.name] = artifacts.size();
    artifacts.push_back(std::move(a));
  }
  return artifacts;
}

}  // namespace kneecast::train
