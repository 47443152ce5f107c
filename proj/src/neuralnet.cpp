#include "sentcast/neuralnet.hpp"

#include <cmath>
#include <random>

#include "sentcast/error.hpp"

namespace sentcast {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(OutputHead head) {
  return head == OutputHead::Linear ? "linear" : "softmax_bins";
}

OutputHead parse_output_head(std::string_view text) {
  if (text == "linear") return OutputHead::Linear;
  if (text == "softmax_bins") return OutputHead::SoftmaxBins;
  throw Error(ErrorCode::ConfigError, "unknown output head '" + std::string(text) + "'");
}

void ModelConfig::validate() const {
  if (hidden_units < 1) throw Error(ErrorCode::InvalidShape, "hidden_units must be >= 1");
  if (lookback < 1 || n_features < 1)
    throw Error(ErrorCode::InvalidShape, "input shape dimensions must be >= 1");
  if (head == OutputHead::SoftmaxBins && bins < 2)
    throw Error(ErrorCode::InvalidShape, "softmax_bins head needs at least 2 bins");
}

// ---------------------------------------------------------------------------
// Parameters

namespace {

template <class P, class F>
void visit_tensors(P& p, F&& f) {
  static const char* layer_names[] = {"l1", "l2"};
  for (int l = 0; l < 2; ++l) {
    auto& layer = p.layers[l];
    for (int d = 0; d < 2; ++d) {
      auto& w = d == 0 ? layer.forward : layer.backward;
      const std::string prefix = std::string(layer_names[l]) + (d == 0 ? ".fwd." : ".bwd.");
      f(prefix + "W", w.input.data(), w.input.rows(), w.input.cols());
      f(prefix + "U", w.recurrent.data(), w.recurrent.rows(), w.recurrent.cols());
      f(prefix + "b", w.bias.data(), w.bias.rows(), Index{1});
    }
  }
  f(std::string("head.W"), p.head_weight.data(), p.head_weight.rows(), p.head_weight.cols());
  f(std::string("head.b"), p.head_bias.data(), p.head_bias.rows(), Index{1});
}

}  // namespace

void Parameters::for_each(const Visitor& f) {
  visit_tensors(*this, [&](const std::string& n, double* d, Index r, Index c) { f(n, d, r, c); });
}

void Parameters::for_each(const ConstVisitor& f) const {
  visit_tensors(*this,
                [&](const std::string& n, const double* d, Index r, Index c) { f(n, d, r, c); });
}

std::size_t Parameters::size() const {
  std::size_t n = 0;
  for_each(ConstVisitor([&](std::string_view, const double*, Index r, Index c) {
    n += static_cast<std::size_t>(r * c);
  }));
  return n;
}

Parameters Parameters::zeros_like() const {
  Parameters z = *this;
  z.for_each(Visitor([](std::string_view, double* d, Index r, Index c) {
    std::fill(d, d + r * c, 0.0);
  }));
  return z;
}

VectorXd Parameters::flatten() const {
  VectorXd flat(static_cast<Index>(size()));
  Index off = 0;
  for_each(ConstVisitor([&](std::string_view, const double* d, Index r, Index c) {
    flat.segment(off, r * c) = Eigen::Map<const VectorXd>(d, r * c);
    off += r * c;
  }));
  return flat;
}

void Parameters::assign(const VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != size())
    throw Error(ErrorCode::ShapeMismatch, "flat parameter vector has wrong length");
  Index off = 0;
  for_each(Visitor([&](std::string_view, double* d, Index r, Index c) {
    Eigen::Map<VectorXd>(d, r * c) = flat.segment(off, r * c);
    off += r * c;
  }));
}

bool Parameters::all_finite() const {
  bool ok = true;
  for_each(ConstVisitor([&](std::string_view, const double* d, Index r, Index c) {
    ok = ok && Eigen::Map<const VectorXd>(d, r * c).allFinite();
  }));
  return ok;
}

// ---------------------------------------------------------------------------
// Initialization

namespace {

class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}
  // mt19937_64 output is fully specified; std::uniform_real_distribution is not.
  double operator()(double limit) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * limit;
  }

 private:
  std::mt19937_64 engine_;
};

void glorot_fill(MatrixXd& m, Index rows, Index cols, Index fan_in, Index fan_out,
                 UniformSource& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  m.resize(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng(limit);
}

LstmWeights init_direction(Index n_in, Index h, UniformSource& rng) {
  LstmWeights w;
  glorot_fill(w.input, 4 * h, n_in, n_in, 4 * h, rng);
  glorot_fill(w.recurrent, 4 * h, h, h, 4 * h, rng);
  w.bias = VectorXd::Zero(4 * h);
  w.bias.segment(h, h).setOnes();  // forget gate
  return w;
}

}  // namespace

BiLstmModel init_model(const ModelConfig& config) {
  config.validate();
  const Index h = config.hidden_units;
  UniformSource rng(config.seed);
  BiLstmModel model;
  model.config = config;
  Index n_in = config.n_features;
  for (auto& layer : model.params.layers) {
    layer.forward = init_direction(n_in, h, rng);
    layer.backward = init_direction(n_in, h, rng);
    n_in = 2 * h;
  }
  const Index outputs = config.head_outputs();
  glorot_fill(model.params.head_weight, outputs, 2 * h, 2 * h, outputs, rng);
  model.params.head_bias = VectorXd::Zero(outputs);
  return model;
}

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

MatrixXd sigmoid(const MatrixXd& a) {
  return (1.0 + (-a.array()).exp()).inverse().matrix();
}

/// Activations of one direction over a sequence, in processing order.
struct DirectionTrace {
  std::vector<MatrixXd> x, i, f, g, o, c, tanh_c, h;
};

DirectionTrace run_direction(const LstmWeights& w, const std::vector<MatrixXd>& xs) {
  const Index h = w.recurrent.cols();
  const Index b = xs.empty() ? 0 : xs.front().cols();
  DirectionTrace tr;
  tr.x = xs;
  MatrixXd h_prev = MatrixXd::Zero(h, b);
  MatrixXd c_prev = MatrixXd::Zero(h, b);
  for (const auto& x : xs) {
    MatrixXd a = w.input * x + w.recurrent * h_prev;
    a.colwise() += w.bias;
    MatrixXd i = sigmoid(a.middleRows(0, h));
    MatrixXd f = sigmoid(a.middleRows(h, h));
    MatrixXd g = a.middleRows(2 * h, h).array().tanh().matrix();
    MatrixXd o = sigmoid(a.middleRows(3 * h, h));
    MatrixXd c = (f.array() * c_prev.array() + i.array() * g.array()).matrix();
    MatrixXd tc = c.array().tanh().matrix();
    MatrixXd hh = (o.array() * tc.array()).matrix();
    tr.i.push_back(std::move(i));
    tr.f.push_back(std::move(f));
    tr.g.push_back(std::move(g));
    tr.o.push_back(std::move(o));
    tr.c.push_back(c);
    tr.tanh_c.push_back(std::move(tc));
    tr.h.push_back(hh);
    h_prev = std::move(hh);
    c_prev = std::move(c);
  }
  return tr;
}

/// Backpropagates `dh_ext` (external gradient on each step's hidden state,
/// processing order; empty matrices mean zero) through one direction.
/// Accumulates into `grad` and returns the gradient on each input step.
std::vector<MatrixXd> backprop_direction(const LstmWeights& w, const DirectionTrace& tr,
                                         const std::vector<MatrixXd>& dh_ext, LstmWeights& grad) {
  const std::size_t steps = tr.h.size();
  const Index h = w.recurrent.cols();
  const Index b = steps ? tr.h.front().cols() : 0;
  std::vector<MatrixXd> dx(steps);
  MatrixXd dh_next = MatrixXd::Zero(h, b);
  MatrixXd dc_next = MatrixXd::Zero(h, b);
  MatrixXd da(4 * h, b);
  const MatrixXd zeros = MatrixXd::Zero(h, b);

  for (std::size_t s = steps; s-- > 0;) {
    MatrixXd dh = dh_next;
    if (dh_ext[s].size() != 0) dh += dh_ext[s];
    const auto& i = tr.i[s].array();
    const auto& f = tr.f[s].array();
    const auto& g = tr.g[s].array();
    const auto& o = tr.o[s].array();
    const auto& tc = tr.tanh_c[s].array();
    const MatrixXd& c_prev = s > 0 ? tr.c[s - 1] : zeros;
    const MatrixXd& h_prev = s > 0 ? tr.h[s - 1] : zeros;

    const auto dha = dh.array();
    MatrixXd dc = (dc_next.array() + dha * o * (1.0 - tc.square())).matrix();
    const auto dca = dc.array();
    da.middleRows(0, h) = (dca * g * i * (1.0 - i)).matrix();
    da.middleRows(h, h) = (dca * c_prev.array() * f * (1.0 - f)).matrix();
    da.middleRows(2 * h, h) = (dca * i * (1.0 - g.square())).matrix();
    da.middleRows(3 * h, h) = (dha * tc * o * (1.0 - o)).matrix();

    grad.input.noalias() += da * tr.x[s].transpose();
    grad.recurrent.noalias() += da * h_prev.transpose();
    grad.bias += da.rowwise().sum();
    dx[s].noalias() = w.input.transpose() * da;
    dh_next.noalias() = w.recurrent.transpose() * da;
    dc_next = (dca * f).matrix();
  }
  return dx;
}

template <class T>
std::vector<T> reversed(const std::vector<T>& v) {
  return {v.rbegin(), v.rend()};
}

struct LayerTrace {
  DirectionTrace fwd, bwd;
  std::vector<MatrixXd> outputs;  // per original time step, 2H x B
  MatrixXd final_state;           // [fwd last; bwd last]
};

LayerTrace run_layer(const BiLstmLayer& layer, const std::vector<MatrixXd>& steps) {
  LayerTrace lt;
  lt.fwd = run_direction(layer.forward, steps);
  lt.bwd = run_direction(layer.backward, reversed(steps));
  const std::size_t w = steps.size();
  const Index h = layer.forward.recurrent.cols();
  const Index b = steps.front().cols();
  lt.outputs.resize(w);
  for (std::size_t t = 0; t < w; ++t) {
    MatrixXd out(2 * h, b);
    out.topRows(h) = lt.fwd.h[t];
    out.bottomRows(h) = lt.bwd.h[w - 1 - t];
    lt.outputs[t] = std::move(out);
  }
  lt.final_state.resize(2 * h, b);
  lt.final_state.topRows(h) = lt.fwd.h.back();
  lt.final_state.bottomRows(h) = lt.bwd.h.back();
  return lt;
}

std::vector<MatrixXd> to_steps(const ModelConfig& cfg, SampleBatch batch) {
  const Index b = static_cast<Index>(batch.size());
  std::vector<MatrixXd> steps(cfg.lookback, MatrixXd(cfg.n_features, b));
  for (Index s = 0; s < b; ++s) {
    const auto& x = batch[static_cast<std::size_t>(s)];
    if (x.rows() != cfg.lookback || x.cols() != cfg.n_features)
      throw Error(ErrorCode::ShapeMismatch,
                  "sample " + std::to_string(s) + " is " + std::to_string(x.rows()) + "x" +
                      std::to_string(x.cols()) + ", model expects " +
                      std::to_string(cfg.lookback) + "x" + std::to_string(cfg.n_features));
    for (Index t = 0; t < cfg.lookback; ++t) steps[t].col(s) = x.row(t).transpose();
  }
  return steps;
}

VectorXd bin_centres(int bins) {
  return VectorXd::LinSpaced(bins, 0.0, 1.0);
}

struct ForwardTrace {
  LayerTrace layer1, layer2;
  MatrixXd probs;  // softmax head only, bins x B
  Eigen::RowVectorXd y;
};

ForwardTrace forward_trace(const BiLstmModel& model, SampleBatch batch) {
  ForwardTrace ft;
  const auto steps = to_steps(model.config, batch);
  ft.layer1 = run_layer(model.params.layers[0], steps);
  ft.layer2 = run_layer(model.params.layers[1], ft.layer1.outputs);
  MatrixXd logits = model.params.head_weight * ft.layer2.final_state;
  logits.colwise() += model.params.head_bias;
  if (model.config.head == OutputHead::Linear) {
    ft.y = logits.row(0);
  } else {
    const Eigen::RowVectorXd col_max = logits.colwise().maxCoeff();
    MatrixXd e = (logits.rowwise() - col_max).array().exp().matrix();
    const Eigen::RowVectorXd denom = e.colwise().sum();
    ft.probs = e.array().rowwise() / denom.array();
    ft.y = bin_centres(model.config.bins).transpose() * ft.probs;
  }
  return ft;
}

LstmWeights zero_like(const LstmWeights& w) {
  return {MatrixXd::Zero(w.input.rows(), w.input.cols()),
          MatrixXd::Zero(w.recurrent.rows(), w.recurrent.cols()), VectorXd::Zero(w.bias.size())};
}

}  // namespace

std::vector<MatrixXd> run_bilstm_layer(const BiLstmLayer& layer, const std::vector<MatrixXd>& steps,
                                       MatrixXd* final_state) {
  if (steps.empty()) throw Error(ErrorCode::ShapeMismatch, "empty sequence");
  auto lt = run_layer(layer, steps);
  if (final_state) *final_state = lt.final_state;
  return lt.outputs;
}

std::vector<double> forward(const BiLstmModel& model, SampleBatch batch) {
  if (batch.empty()) return {};
  const auto ft = forward_trace(model, batch);
  return {ft.y.data(), ft.y.data() + ft.y.size()};
}

double mse_loss(const BiLstmModel& model, SampleBatch batch, std::span<const double> targets) {
  if (batch.size() != targets.size() || batch.empty())
    throw Error(ErrorCode::ShapeMismatch, "batch and target sizes differ or are zero");
  const auto y = forward(model, batch);
  double sum = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) sum += (y[k] - targets[k]) * (y[k] - targets[k]);
  return sum / static_cast<double>(y.size());
}

LossAndGradients loss_and_gradients(const BiLstmModel& model, SampleBatch batch,
                                    std::span<const double> targets) {
  if (batch.size() != targets.size() || batch.empty())
    throw Error(ErrorCode::ShapeMismatch, "batch and target sizes differ or are zero");
  const auto& p = model.params;
  const Index b = static_cast<Index>(batch.size());
  const Index h = model.config.hidden_units;
  const std::size_t w = static_cast<std::size_t>(model.config.lookback);

  const auto ft = forward_trace(model, batch);
  const Eigen::Map<const Eigen::RowVectorXd> y_true(targets.data(), b);
  const Eigen::RowVectorXd resid = ft.y - y_true;

  LossAndGradients out;
  out.loss = resid.squaredNorm() / static_cast<double>(b);
  Parameters& g = out.gradients;
  for (std::size_t l = 0; l < 2; ++l) {
    g.layers[l].forward = zero_like(p.layers[l].forward);
    g.layers[l].backward = zero_like(p.layers[l].backward);
  }

  // Head.
  const Eigen::RowVectorXd dy = resid * (2.0 / static_cast<double>(b));
  MatrixXd dlogits;
  if (model.config.head == OutputHead::Linear) {
    dlogits = dy;
  } else {
    // d y / d logit_k = p_k (centre_k - y)
    const VectorXd centres = bin_centres(model.config.bins);
    MatrixXd diff = (-ft.y).replicate(centres.size(), 1);
    diff.colwise() += centres;
    dlogits = (ft.probs.array() * diff.array()).matrix();
    dlogits.array().rowwise() *= dy.array();
  }
  g.head_weight = dlogits * ft.layer2.final_state.transpose();
  g.head_bias = dlogits.rowwise().sum();
  const MatrixXd dz = p.head_weight.transpose() * dlogits;

  // Layer 2: only each direction's last step receives external gradient.
  std::vector<MatrixXd> ext_f(w), ext_b(w);
  ext_f[w - 1] = dz.topRows(h);
  ext_b[w - 1] = dz.bottomRows(h);
  const auto dx2f = backprop_direction(p.layers[1].forward, ft.layer2.fwd, ext_f, g.layers[1].forward);
  const auto dx2b =
      backprop_direction(p.layers[1].backward, ft.layer2.bwd, ext_b, g.layers[1].backward);

  // Route layer-2 input gradients back onto layer-1 directions.
  for (std::size_t t = 0; t < w; ++t) {
    const MatrixXd d_out = dx2f[t] + dx2b[w - 1 - t];
    ext_f[t] = d_out.topRows(h);
    ext_b[w - 1 - t] = d_out.bottomRows(h);
  }
  backprop_direction(p.layers[0].forward, ft.layer1.fwd, ext_f, g.layers[0].forward);
  backprop_direction(p.layers[0].backward, ft.layer1.bwd, ext_b, g.layers[0].backward);
  return out;
}

std::vector<double> predict(const BiLstmModel& model, const WindowedSet& windows) {
  if (windows.size() == 0) return {};
  // Chunked so memory stays bounded on long test sets.
  constexpr std::size_t kChunk = 256;
  std::vector<double> out;
  out.reserve(windows.size());
  for (std::size_t begin = 0; begin < windows.size(); begin += kChunk) {
    const std::size_t n = std::min(kChunk, windows.size() - begin);
    auto part = forward(model, SampleBatch(windows.inputs.data() + begin, n));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace sentcast
