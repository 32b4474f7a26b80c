#include "hcmc/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hcmc/errors.hpp"
#include "hcmc/rng.hpp"

namespace hcmc {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstWeight = Eigen::Map<const RowMatrix>;
using ConstBias = Eigen::Map<const Eigen::VectorXd>;
using Weight = Eigen::Map<RowMatrix>;
using Bias = Eigen::Map<Eigen::VectorXd>;

ConstWeight weight_of(std::span<const double> buf, const DenseLayout& l) {
  return ConstWeight(buf.data() + l.weight_offset, static_cast<Eigen::Index>(l.rows),
                     static_cast<Eigen::Index>(l.cols));
}
ConstBias bias_of(std::span<const double> buf, const DenseLayout& l) {
  return ConstBias(buf.data() + l.bias_offset, static_cast<Eigen::Index>(l.rows));
}
Weight weight_of(std::span<double> buf, const DenseLayout& l) {
  return Weight(buf.data() + l.weight_offset, static_cast<Eigen::Index>(l.rows), static_cast<Eigen::Index>(l.cols));
}
Bias bias_of(std::span<double> buf, const DenseLayout& l) {
  return Bias(buf.data() + l.bias_offset, static_cast<Eigen::Index>(l.rows));
}

Eigen::Map<const Eigen::VectorXd> as_vector(const FeatureVector& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

FeatureVector to_feature(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void check_input(const ModelParams& params, const FeatureVector& x) {
  if (x.size() != params.config().input_dim()) {
    throw std::invalid_argument("model input has dimension " + std::to_string(x.size()) + ", expected " +
                                std::to_string(params.config().input_dim()));
  }
}

Eigen::VectorXd encode(const ModelParams& params, const FeatureVector& x) {
  check_input(params, x);
  const auto buf = params.values();
  const auto& enc = params.encoder();
  return (weight_of(buf, enc) * as_vector(x) + bias_of(buf, enc)).array().tanh().matrix();
}

double log_sum_exp(std::span<const double> xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double dot(const FeatureVector& a, const FeatureVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("embedding dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::string_view level_name(Level level) {
  switch (level) {
    case Level::frame:
      return "frame";
    case Level::shot:
      return "shot";
    case Level::scene:
      return "scene";
  }
  return "unknown";
}

Level parse_level(std::string_view name) {
  for (Level l : kAllLevels) {
    if (level_name(l) == name) return l;
  }
  throw std::invalid_argument("unknown level '" + std::string(name) + "'");
}

void ModelConfig::validate() const {
  if (d_v == 0 || d_u == 0 || hidden_dim == 0 || proj_dim == 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (n_negatives == 0) throw std::invalid_argument("n_negatives must be >= 1");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  if (!(lr > 0.0) || !(eps > 0.0) || beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0 ||
      weight_decay < 0.0) {
    throw std::invalid_argument("invalid optimizer settings");
  }
}

std::string config_to_json(const ModelConfig& c) {
  nlohmann::json j{{"d_v", c.d_v},
                   {"d_u", c.d_u},
                   {"hidden_dim", c.hidden_dim},
                   {"proj_dim", c.proj_dim},
                   {"lambda", c.lambda},
                   {"n_negatives", c.n_negatives},
                   {"lr", c.lr},
                   {"beta1", c.beta1},
                   {"beta2", c.beta2},
                   {"eps", c.eps},
                   {"weight_decay", c.weight_decay},
                   {"batch_size", c.batch_size},
                   {"epochs", c.epochs},
                   {"seed", c.seed},
                   {"per_level_heads", c.per_level_heads}};
  return j.dump();
}

ModelConfig config_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  ModelConfig c;
  auto take = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  take("d_v", c.d_v);
  take("d_u", c.d_u);
  take("hidden_dim", c.hidden_dim);
  take("proj_dim", c.proj_dim);
  take("lambda", c.lambda);
  take("n_negatives", c.n_negatives);
  take("lr", c.lr);
  take("beta1", c.beta1);
  take("beta2", c.beta2);
  take("eps", c.eps);
  take("weight_decay", c.weight_decay);
  take("batch_size", c.batch_size);
  take("epochs", c.epochs);
  take("seed", c.seed);
  take("per_level_heads", c.per_level_heads);
  return c;
}

// ---------------------------------------------------------------------------

ModelParams::ModelParams(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::size_t in = config_.input_dim();
  const std::size_t h = config_.hidden_dim;
  encoder_ = add_dense("encoder", h, in);
  for (std::size_t k = 0; k < config_.head_count(); ++k) {
    const std::string tag = config_.per_level_heads ? std::string(level_name(kAllLevels[k])) : "shared";
    HeadLayout head;
    head.phi_hidden = add_dense("phi." + tag + ".hidden", h, 2 * h);
    head.phi_out = add_dense("phi." + tag + ".out", 2, h);
    head.psi = add_dense("psi." + tag, config_.proj_dim, h);
    heads_.push_back(head);
  }
  values_.assign(values_.size(), 0.0);
  opt_.m.assign(values_.size(), 0.0);
  opt_.v.assign(values_.size(), 0.0);
}

DenseLayout ModelParams::add_dense(const std::string& prefix, std::size_t rows, std::size_t cols) {
  DenseLayout l{rows, cols, values_.size(), values_.size() + rows * cols};
  tensors_.push_back({prefix + ".weight", rows, cols, l.weight_offset});
  tensors_.push_back({prefix + ".bias", rows, 1, l.bias_offset});
  values_.resize(values_.size() + rows * cols + rows, 0.0);
  return l;
}

ModelParams ModelParams::initialize(const ModelConfig& config) {
  ModelParams p(config);
  Rng rng(derive_seed(config.seed, "model.init"));
  for (const auto& t : p.tensors_) {
    if (t.name.ends_with(".bias")) continue;
    const double limit = std::sqrt(6.0 / static_cast<double>(t.rows + t.cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t i = 0; i < t.size(); ++i) p.values_[t.offset + i] = dist(rng);
  }
  return p;
}

std::span<double> ModelParams::tensor(std::string_view name) {
  for (const auto& t : tensors_) {
    if (t.name == name) return std::span<double>(values_).subspan(t.offset, t.size());
  }
  throw std::invalid_argument("unknown tensor '" + std::string(name) + "'");
}

std::span<const double> ModelParams::tensor(std::string_view name) const {
  return const_cast<ModelParams*>(this)->tensor(name);
}

std::size_t ModelParams::head_index(Level level) const {
  return config_.per_level_heads ? static_cast<std::size_t>(level) : 0;
}

// ---------------------------------------------------------------------------

FeatureVector encode_frame(const FeatureVector& vision_feat, const FeatureVector& text_feat) {
  FeatureVector out;
  out.reserve(vision_feat.size() + text_feat.size());
  out.insert(out.end(), vision_feat.begin(), vision_feat.end());
  out.insert(out.end(), text_feat.begin(), text_feat.end());
  return out;
}

FeatureVector encode_frame(const ModelConfig& config, const FeatureVector& vision_feat,
                           const FeatureVector& text_feat) {
  if (vision_feat.size() != config.d_v || text_feat.size() != config.d_u) {
    throw std::invalid_argument("frame features have dims (" + std::to_string(vision_feat.size()) + ", " +
                                std::to_string(text_feat.size()) + "), model expects (" +
                                std::to_string(config.d_v) + ", " + std::to_string(config.d_u) + ")");
  }
  return encode_frame(vision_feat, text_feat);
}

FeatureVector pool_group(std::span<const FeatureVector> members) {
  if (members.empty()) throw std::invalid_argument("pool_group: no members");
  FeatureVector mean(members.front().size(), 0.0);
  for (const auto& m : members) {
    if (m.size() != mean.size()) throw std::invalid_argument("pool_group: members differ in dimension");
    for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += m[d];
  }
  for (double& v : mean) v /= static_cast<double>(members.size());
  return mean;
}

Logits phi_forward(const ModelParams& params, Level level, const FeatureVector& a, const FeatureVector& b) {
  const auto buf = params.values();
  const auto& head = params.head(level);
  const std::size_t h = params.config().hidden_dim;
  Eigen::VectorXd z(static_cast<Eigen::Index>(2 * h));
  z << encode(params, a), encode(params, b);
  const Eigen::VectorXd hidden =
      (weight_of(buf, head.phi_hidden) * z + bias_of(buf, head.phi_hidden)).array().tanh().matrix();
  const Eigen::VectorXd out = weight_of(buf, head.phi_out) * hidden + bias_of(buf, head.phi_out);
  Logits logits{out[0], out[1]};
  if (!std::isfinite(logits[0]) || !std::isfinite(logits[1])) throw NumericalError("phi produced non-finite logits");
  return logits;
}

FeatureVector psi_forward(const ModelParams& params, Level level, const FeatureVector& x) {
  const auto buf = params.values();
  const auto& head = params.head(level);
  const Eigen::VectorXd p = weight_of(buf, head.psi) * encode(params, x) + bias_of(buf, head.psi);
  const double norm = p.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("psi projection has zero or non-finite norm");
  return to_feature(p / norm);
}

double loss_cls(const Logits& logits, int order_label) {
  if (order_label != 0 && order_label != 1) throw std::invalid_argument("order label must be 0 or 1");
  return log_sum_exp(logits) - logits[static_cast<std::size_t>(order_label)];
}

double loss_cl(const FeatureVector& anchor, const FeatureVector& positive, std::span<const FeatureVector> negatives) {
  if (negatives.empty()) throw std::invalid_argument("loss_cl: at least one negative required");
  std::vector<double> sims;
  sims.reserve(negatives.size() + 1);
  sims.push_back(dot(anchor, positive));
  for (const auto& q : negatives) sims.push_back(dot(anchor, q));
  return log_sum_exp(sims) - sims.front();
}

LossParts loss_total(const TrainingPair& pair, const ModelParams& params, double lambda) {
  LossParts out;
  out.cls = loss_cls(phi_forward(params, pair.level, pair.a, pair.b), pair.order_label);
  const auto anchor = psi_forward(params, pair.level, pair.a);
  const auto positive = psi_forward(params, pair.level, pair.b);
  std::vector<FeatureVector> negs;
  negs.reserve(pair.negatives.size());
  for (const auto& q : pair.negatives) negs.push_back(psi_forward(params, pair.level, q));
  out.cl = loss_cl(anchor, positive, negs);
  out.total = out.cls + (pair.same_group ? lambda * out.cl : 0.0);
  return out;
}

// ---------------------------------------------------------------------------
// Batched manual backward pass. Columns of the input matrix are laid out as
// [a_0..a_{B-1}, b_0..b_{B-1}, negatives of pair 0, negatives of pair 1, ...].

Gradient backward(std::span<const TrainingPair> batch, const ModelParams& params, double lambda) {
  if (batch.empty()) throw std::invalid_argument("backward: empty batch");
  const auto& cfg = params.config();
  const auto buf = params.values();
  const auto in_dim = static_cast<Eigen::Index>(cfg.input_dim());
  const auto h = static_cast<Eigen::Index>(cfg.hidden_dim);
  const double scale = 1.0 / static_cast<double>(batch.size());

  Gradient grad;
  grad.values.assign(params.size(), 0.0);
  std::span<double> gbuf(grad.values);

  const auto& enc = params.encoder();
  const ConstWeight w_enc = weight_of(buf, enc);
  const ConstBias b_enc = bias_of(buf, enc);
  Weight gw_enc = weight_of(gbuf, enc);
  Bias gb_enc = bias_of(gbuf, enc);

  std::map<std::size_t, std::vector<const TrainingPair*>> groups;
  for (const auto& pair : batch) {
    if (pair.order_label != 0 && pair.order_label != 1) throw std::invalid_argument("order label must be 0 or 1");
    if (pair.negatives.empty()) throw std::invalid_argument("backward: pair without negatives");
    groups[params.head_index(pair.level)].push_back(&pair);
  }

  for (const auto& [head_idx, pairs] : groups) {
    const auto& head = params.head(pairs.front()->level);
    const auto n_pairs = static_cast<Eigen::Index>(pairs.size());
    std::vector<Eigen::Index> neg_start(pairs.size());
    Eigen::Index cols = 2 * n_pairs;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      neg_start[i] = cols;
      cols += static_cast<Eigen::Index>(pairs[i]->negatives.size());
    }

    Eigen::MatrixXd x(in_dim, cols);
    auto put = [&](Eigen::Index col, const FeatureVector& v) {
      if (static_cast<Eigen::Index>(v.size()) != in_dim) {
        throw std::invalid_argument("backward: input has dimension " + std::to_string(v.size()));
      }
      x.col(col) = as_vector(v);
    };
    for (Eigen::Index i = 0; i < n_pairs; ++i) {
      const auto& p = *pairs[static_cast<std::size_t>(i)];
      put(i, p.a);
      put(n_pairs + i, p.b);
      for (std::size_t k = 0; k < p.negatives.size(); ++k) {
        put(neg_start[static_cast<std::size_t>(i)] + static_cast<Eigen::Index>(k), p.negatives[k]);
      }
    }

    // Forward.
    const Eigen::MatrixXd e = ((w_enc * x).colwise() + b_enc).array().tanh().matrix();
    Eigen::MatrixXd z(2 * h, n_pairs);
    z.topRows(h) = e.leftCols(n_pairs);
    z.bottomRows(h) = e.middleCols(n_pairs, n_pairs);
    const ConstWeight w1 = weight_of(buf, head.phi_hidden);
    const ConstWeight w2 = weight_of(buf, head.phi_out);
    const ConstWeight wp = weight_of(buf, head.psi);
    const Eigen::MatrixXd h1 = ((w1 * z).colwise() + bias_of(buf, head.phi_hidden)).array().tanh().matrix();
    const Eigen::MatrixXd logits = (w2 * h1).colwise() + bias_of(buf, head.phi_out);
    const Eigen::MatrixXd proj = (wp * e).colwise() + bias_of(buf, head.psi);
    const Eigen::RowVectorXd norms = proj.colwise().norm();
    if (!norms.allFinite() || (norms.array() <= 0.0).any()) {
      throw NumericalError("backward: psi projection has zero or non-finite norm");
    }
    const Eigen::MatrixXd y = proj.array().rowwise() / norms.array();

    // Classification head.
    Eigen::MatrixXd d_logits(2, n_pairs);
    for (Eigen::Index i = 0; i < n_pairs; ++i) {
      const auto& p = *pairs[static_cast<std::size_t>(i)];
      const Logits l{logits(0, i), logits(1, i)};
      const double lse = log_sum_exp(l);
      grad.loss.cls += scale * (lse - l[static_cast<std::size_t>(p.order_label)]);
      for (Eigen::Index c = 0; c < 2; ++c) {
        d_logits(c, i) = scale * (std::exp(l[static_cast<std::size_t>(c)] - lse) - (c == p.order_label ? 1.0 : 0.0));
      }
    }
    weight_of(gbuf, head.phi_out).noalias() += d_logits * h1.transpose();
    bias_of(gbuf, head.phi_out) += d_logits.rowwise().sum();
    const Eigen::MatrixXd d_pre1 = ((w2.transpose() * d_logits).array() * (1.0 - h1.array().square())).matrix();
    weight_of(gbuf, head.phi_hidden).noalias() += d_pre1 * z.transpose();
    bias_of(gbuf, head.phi_hidden) += d_pre1.rowwise().sum();
    const Eigen::MatrixXd d_z = w1.transpose() * d_pre1;

    Eigen::MatrixXd d_e = Eigen::MatrixXd::Zero(h, cols);
    d_e.leftCols(n_pairs) += d_z.topRows(h);
    d_e.middleCols(n_pairs, n_pairs) += d_z.bottomRows(h);

    // Contrastive head.
    Eigen::MatrixXd d_y = Eigen::MatrixXd::Zero(y.rows(), cols);
    for (Eigen::Index i = 0; i < n_pairs; ++i) {
      const auto& p = *pairs[static_cast<std::size_t>(i)];
      const auto n_neg = static_cast<Eigen::Index>(p.negatives.size());
      const Eigen::Index q0 = neg_start[static_cast<std::size_t>(i)];
      std::vector<double> sims(static_cast<std::size_t>(n_neg + 1));
      sims[0] = y.col(i).dot(y.col(n_pairs + i));
      for (Eigen::Index k = 0; k < n_neg; ++k) sims[static_cast<std::size_t>(k + 1)] = y.col(i).dot(y.col(q0 + k));
      const double lse = log_sum_exp(sims);
      const double cl = lse - sims[0];
      grad.loss.cl += scale * cl;
      if (!p.same_group) continue;
      grad.loss.total += scale * lambda * cl;
      const double w = scale * lambda;
      const double d_pos = w * (std::exp(sims[0] - lse) - 1.0);
      d_y.col(i) += d_pos * y.col(n_pairs + i);
      d_y.col(n_pairs + i) += d_pos * y.col(i);
      for (Eigen::Index k = 0; k < n_neg; ++k) {
        const double d_neg = w * std::exp(sims[static_cast<std::size_t>(k + 1)] - lse);
        d_y.col(i) += d_neg * y.col(q0 + k);
        d_y.col(q0 + k) += d_neg * y.col(i);
      }
    }
    // Through the L2 normalization: dp = (dy - y (y . dy)) / |p|.
    const Eigen::RowVectorXd radial = (y.array() * d_y.array()).colwise().sum();
    const Eigen::MatrixXd d_proj =
        ((d_y.array() - y.array().rowwise() * radial.array()).rowwise() / norms.array()).matrix();
    weight_of(gbuf, head.psi).noalias() += d_proj * e.transpose();
    bias_of(gbuf, head.psi) += d_proj.rowwise().sum();
    d_e.noalias() += wp.transpose() * d_proj;

    // Shared encoder.
    const Eigen::MatrixXd d_pre_e = (d_e.array() * (1.0 - e.array().square())).matrix();
    gw_enc.noalias() += d_pre_e * x.transpose();
    gb_enc += d_pre_e.rowwise().sum();
  }
  grad.loss.total += grad.loss.cls;

  if (!std::isfinite(grad.loss.total) || !all_finite(grad.values)) {
    throw NumericalError("backward: non-finite loss or gradient");
  }
  return grad;
}

void adamw_step(ModelParams& params, std::span<const double> gradient) {
  if (gradient.size() != params.size()) throw std::invalid_argument("adamw_step: gradient size mismatch");
  const auto& cfg = params.config();
  auto& opt = params.optimizer();
  ++opt.step;
  const double t = static_cast<double>(opt.step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2_sqrt = std::sqrt(1.0 - std::pow(cfg.beta2, t));
  const double step_size = cfg.lr / bc1;
  const double decay = 1.0 - cfg.lr * cfg.weight_decay;

  Eigen::Map<Eigen::ArrayXd> p(params.values().data(), static_cast<Eigen::Index>(params.size()));
  Eigen::Map<const Eigen::ArrayXd> g(gradient.data(), static_cast<Eigen::Index>(gradient.size()));
  Eigen::Map<Eigen::ArrayXd> m(opt.m.data(), static_cast<Eigen::Index>(opt.m.size()));
  Eigen::Map<Eigen::ArrayXd> v(opt.v.data(), static_cast<Eigen::Index>(opt.v.size()));

  p *= decay;
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.square();
  p -= step_size * m / (v.sqrt() / bc2_sqrt + cfg.eps);
}

}  // namespace hcmc
