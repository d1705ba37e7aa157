#include "kneecast/train/early_stopping.hpp"

#include "kneecast/error.hpp"

namespace kneecast::train {

EarlyStopper::EarlyStopper(int patience) : patience_(patience) {
  if (patience < 1) throw ConfigError("patience must be >= 1", "train");
}

bool EarlyStopper::update(double loss) {
  ++epochs_;
  improved_ = best_epoch_ == 0 || loss < best_loss_;
  if (improved_) {
    best_loss_ = loss;
    best_epoch_ = epochs_;
    stale_ = 0;
  } else {
    ++stale_;
  }
  return stale_ >= patience_;
}

}  // namespace kneecast::train
