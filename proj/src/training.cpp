#include <cmath>
#include <limits>

#include "sentcast/error.hpp"
#include "sentcast/evalmetrics.hpp"
#include "sentcast/neuralnet.hpp"

namespace sentcast {

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCode::ConfigError, "epochs must be >= 1");
  if (batch_size < 1) throw Error(ErrorCode::ConfigError, "batch_size must be >= 1");
  if (!(validation_split >= 0.0 && validation_split <= 0.5))
    throw Error(ErrorCode::ConfigError, "validation_split must lie in [0, 0.5]");
  if (patience < 0) throw Error(ErrorCode::ConfigError, "patience must be >= 0");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::ConfigError, "learning_rate must be > 0");
}

namespace {

class Adam {
 public:
  Adam(const TrainConfig& cfg, Eigen::Index n)
      : cfg_(cfg), m_(Eigen::VectorXd::Zero(n)), v_(Eigen::VectorXd::Zero(n)) {}

  void step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad) {
    ++t_;
    m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
    v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double c2 = 1.0 - std::pow(cfg_.beta2, t_);
    theta.array() -= cfg_.learning_rate * (m_.array() / c1) /
                     ((v_.array() / c2).sqrt() + cfg_.epsilon);
  }

 private:
  TrainConfig cfg_;
  Eigen::VectorXd m_, v_;
  int t_ = 0;
};

EpochRecord score_split(const BiLstmModel& model, const WindowedSet& set) {
  EpochRecord r;
  const auto pred = predict(model, set);
  r.val_loss = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k)
    r.val_loss += (pred[k] - set.targets[k]) * (pred[k] - set.targets[k]);
  r.val_loss /= static_cast<double>(pred.size());
  r.val_mae = mean_absolute_error(pred, set.targets);
  r.val_rmse = std::sqrt(r.val_loss);
  r.val_r2 = r_squared_or_nan(pred, set.targets);
  return r;
}

}  // namespace

TrainingHistory train(BiLstmModel& model, const WindowedSet& windows, const TrainConfig& cfg) {
  cfg.validate();
  if (windows.size() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no windows");
  const std::size_t n = windows.size();
  const auto n_val = static_cast<std::size_t>(std::ceil(cfg.validation_split * static_cast<double>(n)));
  if (n_val >= n)
    throw Error(ErrorCode::EmptyTrainingSet,
                "validation split leaves no training windows (" + std::to_string(n) + " total)");
  const WindowedSet train_set = windows.slice(0, n - n_val);
  // Without a validation tail, early stopping monitors the training set.
  const WindowedSet val_set = n_val > 0 ? windows.slice(n - n_val, n) : train_set;

  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
  Eigen::VectorXd theta = model.params.flatten();
  Adam adam(cfg, theta.size());

  TrainingHistory history;
  double best_loss = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta = theta;
  int since_best = 0;
  const int allowed = std::max(cfg.patience, 1);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t begin = 0; begin < train_set.size(); begin += bs) {
      const std::size_t count = std::min(bs, train_set.size() - begin);
      auto lg = loss_and_gradients(
          model, SampleBatch(train_set.inputs.data() + begin, count),
          std::span<const double>(train_set.targets.data() + begin, count));
      if (!std::isfinite(lg.loss))
        throw Error(ErrorCode::NonFiniteLoss, "epoch " + std::to_string(epoch));
      adam.step(theta, lg.gradients.flatten());
      model.params.assign(theta);
    }
    if (!model.params.all_finite())
      throw Error(ErrorCode::NonFiniteLoss, "non-finite parameter after epoch " + std::to_string(epoch));

    EpochRecord rec = score_split(model, val_set);
    const auto train_pred = predict(model, train_set);
    rec.train_loss = 0.0;
    for (std::size_t k = 0; k < train_pred.size(); ++k)
      rec.train_loss += (train_pred[k] - train_set.targets[k]) * (train_pred[k] - train_set.targets[k]);
    rec.train_loss /= static_cast<double>(train_pred.size());
    if (!std::isfinite(rec.train_loss) || !std::isfinite(rec.val_loss))
      throw Error(ErrorCode::NonFiniteLoss, "epoch " + std::to_string(epoch));
    history.epochs.push_back(rec);

    if (rec.val_loss < best_loss) {
      best_loss = rec.val_loss;
      best_theta = theta;
      history.best_epoch = static_cast<std::size_t>(epoch);
      since_best = 0;
    } else if (++since_best >= allowed) {
      history.stopped_early = epoch + 1 < cfg.epochs;
      break;
    }
  }
  model.params.assign(best_theta);
  return history;
}

}  // namespace sentcast
