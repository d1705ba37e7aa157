#include "kneecast/train/transfer.hpp"

#include <nlohmann/json.hpp>

#include "kneecast/error.hpp"

namespace kneecast::train {

GraftResult graft(const model::Model& source, Scenario target, const model::ModelHyper& hyper, std::uint64_t seed) {
  GraftResult r;
  r.model = model::build_model(target, hyper, seed);
  auto& m = r.model;

  std::vector<std::string> incompatible;
  for (const auto& p : source.params) {
    if (p.group != model::Group::emg_branch) continue;
    const auto* q = m.find(p.name);
    if (q == nullptr || q->tensor.shape != p.tensor.shape) {
      incompatible.push_back(p.name + " " + ad::to_string(p.tensor.shape) + " -> " +
                             (q ? ad::to_string(q->tensor.shape) : std::string("missing")));
    }
  }
  if (!incompatible.empty()) {
    std::string msg = "EMG branch shapes differ:";
    for (const auto& s : incompatible) msg += " " + s + ";";
    throw ConfigError(msg, "graft");
  }

  std::array<bool, 4> all_copied{true, true, true, true};
  std::array<bool, 4> any{};
  for (auto& p : m.params) {
    const auto g = static_cast<std::size_t>(p.group);
    any[g] = true;
    const auto* s = source.find(p.name);
    if (s == nullptr) {
      r.report.fresh.push_back(p.name);
      all_copied[g] = false;
    } else if (s->tensor.shape != p.tensor.shape) {
      r.report.reinitialized.push_back(p.name);
      all_copied[g] = false;
    } else {
      p.tensor.values = s->tensor.values;
      r.report.copied.push_back(p.name);
    }
  }
  for (model::Group g : model::kGroups) {
    const auto i = static_cast<std::size_t>(g);
    model::set_group_training(m, g, true, any[i] && all_copied[i] ? 0.1 : 1.0);
  }
  if (m.frame() == source.frame()) m.target_stats = source.target_stats;
  m.preprocess = source.preprocess;
  m.provenance = source.provenance;
  m.provenance.push_back("graft " + std::string(to_string(source.scenario)) + "->" + std::string(to_string(target)));
  return r;
}

GraftResult transfer_sic_to_dic(const model::Model& sic_model, const model::ModelHyper& dic_hyper,
                                std::uint64_t seed) {
  if (uses_kinematics(sic_model.scenario)) {
    throw ConfigError("source model already uses knee-angle input (" + std::string(to_string(sic_model.scenario)) +
                          ")",
                      "graft");
  }
  const Scenario target = uses_forces(sic_model.scenario) ? Scenario::DIC_F : Scenario::DIC;
  return graft(sic_model, target, dic_hyper, seed);
}

std::string to_json(const GraftReport& report, int indent) {
  return nlohmann::json{{"copied", report.copied}, {"reinitialized", report.reinitialized}, {"fresh", report.fresh}}
      .dump(indent);
}

}  // namespace kneecast::train
