#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sentcast/dataset.hpp"
#include "sentcast/history.hpp"

namespace sentcast {

enum class OutputHead {
  Linear,       // one scalar per sample
  SoftmaxBins,  // expected value of a softmax over evenly spaced bin centres in [0, 1]
};

std::string_view to_string(OutputHead head);
OutputHead parse_output_head(std::string_view text);

struct ModelConfig {
  int hidden_units = 50;
  int lookback = 1;
  int n_features = 1;
  OutputHead head = OutputHead::Linear;
  int bins = 10;
  std::uint64_t seed = 42;

  int head_outputs() const { return head == OutputHead::Linear ? 1 : bins; }
  /// Throws InvalidShape.
  void validate() const;
};

/// One LSTM direction. Gate blocks are stacked input, forget, cell, output.
struct LstmWeights {
  Eigen::MatrixXd input;      // 4H x n_in
  Eigen::MatrixXd recurrent;  // 4H x H
  Eigen::VectorXd bias;       // 4H
};

struct BiLstmLayer {
  LstmWeights forward;
  LstmWeights backward;
};

/// Every trainable tensor. Gradients and optimizer moments reuse this shape.
struct Parameters {
  std::array<BiLstmLayer, 2> layers;
  Eigen::MatrixXd head_weight;  // outputs x 2H
  Eigen::VectorXd head_bias;    // outputs

  using Visitor = std::function<void(std::string_view name, double* data, Eigen::Index rows,
                                     Eigen::Index cols)>;
  using ConstVisitor = std::function<void(std::string_view name, const double* data,
                                          Eigen::Index rows, Eigen::Index cols)>;
  /// Visits tensors in a fixed order; names look like "l1.fwd.W" or "head.b".
  void for_each(const Visitor& f);
  void for_each(const ConstVisitor& f) const;

  std::size_t size() const;
  Parameters zeros_like() const;
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);
  bool all_finite() const;
};

struct BiLstmModel {
  ModelConfig config;
  Parameters params;
  std::vector<std::string> feature_columns;  // optional metadata
};

/// Glorot-uniform matrices, zero biases except forget gates at 1.0, drawn
/// from a seeded mt19937_64 so results match across platforms.
BiLstmModel init_model(const ModelConfig& config);

using SampleBatch = std::span<const Eigen::MatrixXd>;  // each lookback x n_features

std::vector<double> forward(const BiLstmModel& model, SampleBatch batch);

struct LossAndGradients {
  double loss = 0.0;
  Parameters gradients;
};

/// Mean squared error over the batch and its gradient for every parameter,
/// by backpropagation through time through both layers and directions.
LossAndGradients loss_and_gradients(const BiLstmModel& model, SampleBatch batch,
                                    std::span<const double> targets);

double mse_loss(const BiLstmModel& model, SampleBatch batch, std::span<const double> targets);

/// Runs one bidirectional layer over `steps` (each n_in x batch). Returns the
/// per-step concatenated outputs and, in `final_state`, the concatenation of
/// each direction's last hidden state.
std::vector<Eigen::MatrixXd> run_bilstm_layer(const BiLstmLayer& layer,
                                              const std::vector<Eigen::MatrixXd>& steps,
                                              Eigen::MatrixXd* final_state = nullptr);

struct TrainConfig {
  int epochs = 100;
  int batch_size = 32;
  double validation_split = 0.1;
  int patience = 10;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// Adam over chronologically ordered mini-batches. The validation set is the
/// last ceil(split * n) windows. Stops once `patience` epochs (at least one)
/// pass without a new best validation loss, then restores the best weights.
TrainingHistory train(BiLstmModel& model, const WindowedSet& windows, const TrainConfig& cfg);

std::vector<double> predict(const BiLstmModel& model, const WindowedSet& windows);

void save_model(const BiLstmModel& model, const std::string& path);
BiLstmModel load_model(const std::string& path);

}  // namespace sentcast
