#include "kneecast/data/splits.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "kneecast/error.hpp"
#include "kneecast/random.hpp"

namespace kneecast::data {

double SplitPolicy::ratio() const {
  switch (kind) {
    case SplitKind::trial_80_20: return 0.8;
    case SplitKind::half_half: return 0.5;
    case SplitKind::leave_one_subject_out: return 0.0;
  }
  return 0.0;
}

std::string_view to_string(SplitKind kind) {
  switch (kind) {
    case SplitKind::trial_80_20: return "trial_80_20";
    case SplitKind::half_half: return "half_half";
    case SplitKind::leave_one_subject_out: return "leave_one_subject_out";
  }
  return "?";
}

SplitKind parse_split_kind(std::string_view name) {
  if (name == "trial_80_20") return SplitKind::trial_80_20;
  if (name == "half_half") return SplitKind::half_half;
  if (name == "leave_one_subject_out") return SplitKind::leave_one_subject_out;
  throw ConfigError("unknown split kind '" + std::string(name) + "'", "split");
}

SplitIndices split_examples(std::span<const PreprocessedExample> examples, const SplitPolicy& policy) {
  if (examples.size() < 2) {
    throw ConfigError("cannot split " + std::to_string(examples.size()) + " example(s); need at least 2", "split");
  }
  SplitIndices out;

  if (policy.kind == SplitKind::leave_one_subject_out) {
    for (std::size_t i = 0; i < examples.size(); ++i) {
      (examples[i].subject_id == policy.held_out_subject ? out.second : out.first).push_back(i);
    }
  } else {
    // Group by trial, preserving first-seen order of trials.
    std::vector<std::vector<std::size_t>> groups;
    std::map<std::pair<std::string, std::string>, std::size_t> group_of;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      auto key = std::make_pair(examples[i].subject_id, examples[i].trial_id);
      auto [it, inserted] = group_of.try_emplace(key, groups.size());
      if (inserted) groups.emplace_back();
      groups[it->second].push_back(i);
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      auto& idx = groups[g];
      if (policy.shuffled) {
        Rng rng(mix_seed(policy.seed ^ mix_seed(g)));
        for (std::size_t k = idx.size(); k > 1; --k) {
          std::swap(idx[k - 1], idx[rng.below(k)]);
        }
      } else {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
          return examples[a].window_start < examples[b].window_start;
        });
      }
      std::size_t n_first = static_cast<std::size_t>(std::floor(policy.ratio() * idx.size() + 0.5));
      if (idx.size() >= 2) n_first = std::clamp<std::size_t>(n_first, 1, idx.size() - 1);
      else n_first = idx.size();
      out.first.insert(out.first.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_first));
      out.second.insert(out.second.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_first), idx.end());
    }
  }
  if (out.first.empty() || out.second.empty()) {
    throw ConfigError("split '" + std::string(to_string(policy.kind)) + "' produced an empty partition", "split");
  }
  return out;
}

std::vector<PreprocessedExample> select(std::span<const PreprocessedExample> examples,
                                        std::span<const std::size_t> indices) {
  std::vector<PreprocessedExample> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(examples[i]);
  return out;
}

}  // namespace kneecast::data
