#pragma once

#include <cstddef>
#include <vector>

namespace sentcast {

struct EpochRecord {
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_r2 = 0.0;
  double val_mae = 0.0;
  double val_rmse = 0.0;
};

/// Per-epoch training record. When stopped early, the final epoch index is
/// at most best_epoch + max(patience, 1).
struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
};

}  // namespace sentcast
