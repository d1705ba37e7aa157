#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kneecast/model/model.hpp"

namespace kneecast::train {

struct GraftReport {
  std::vector<std::string> copied;         // same name and shape, bit-exact copy
  std::vector<std::string> reinitialized;  // present in both, shape changed
  std::vector<std::string> fresh;          // new in the target architecture
};

struct GraftResult {
  model::Model model;
  GraftReport report;
};

/// Builds a `target` model and copies every tensor whose name and shape
/// match the source. Tensors that are new or changed shape are seeded from
/// `seed`. A group whose tensors were all copied trains at lr_scale 0.1,
/// every other group at 1.0. Throws ConfigError("graft") listing the
/// offending tensors when the EMG branches are incompatible.
GraftResult graft(const model::Model& source, Scenario target, const model::ModelHyper& hyper, std::uint64_t seed);

/// SIC (or SIC_F) model to its knee-history counterpart (DIC or DIC_F).
GraftResult transfer_sic_to_dic(const model::Model& sic_model, const model::ModelHyper& dic_hyper,
                                std::uint64_t seed);

std::string to_json(const GraftReport& report, int indent = 2);

}  // namespace kneecast::train
