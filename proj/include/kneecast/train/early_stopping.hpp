#pragma once

#include <cstddef>

namespace kneecast::train {

/// Stops once `patience` consecutive epochs fail to set a new strict minimum.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience);

  /// Records one epoch's validation loss; returns true when training should stop.
  bool update(double loss);

  bool improved() const { return improved_; }
  /// 1-based epoch of the best loss; 0 before any update.
  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }
  int epochs() const { return epochs_; }
  int stale() const { return stale_; }

 private:
  int patience_;
  int epochs_ = 0;
  int best_epoch_ = 0;
  int stale_ = 0;
  double best_loss_ = 0.0;
  bool improved_ = false;
};

}  // namespace kneecast::train
