#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hcmc/types.hpp"

namespace hcmc {

enum class Level : int { frame = 0, shot = 1, scene = 2 };

inline constexpr std::array<Level, 3> kAllLevels{Level::frame, Level::shot, Level::scene};

std::string_view level_name(Level level);
Level parse_level(std::string_view name);

/// Hyperparameters of the pairwise order classifier and its projection heads.
/// Defaults follow the reference training setup: hidden 512, AdamW(1e-4, 0.9,
/// 0.999, 1e-6), weight decay 0.01, batch 8, 5 epochs, lambda 0.75.
struct ModelConfig {
  std::size_t d_v = 32;
  std::size_t d_u = 16;
  std::size_t hidden_dim = 512;
  std::size_t proj_dim = 64;
  double lambda = 0.75;
  std::size_t n_negatives = 8;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-6;
  double weight_decay = 0.01;
  std::size_t batch_size = 8;
  std::size_t epochs = 5;
  std::uint64_t seed = 0;
  /// One phi/psi head per level on top of the shared encoder; false shares a single head.
  bool per_level_heads = true;

  std::size_t input_dim() const { return d_v + d_u; }
  std::size_t head_count() const { return per_level_heads ? 3 : 1; }
  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

std::string config_to_json(const ModelConfig& config);
ModelConfig config_from_json(std::string_view text);

/// [0] = backward order (b before a), [1] = forward order (a before b).
using Logits = std::array<double, 2>;

struct DenseLayout {
  std::size_t rows = 0;  // output dim
  std::size_t cols = 0;  // input dim
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;
};

/// phi: [enc(a) ; enc(b)] -> tanh hidden -> 2 logits.  psi: enc(x) -> proj_dim, L2-normalized.
struct HeadLayout {
  DenseLayout phi_hidden;
  DenseLayout phi_out;
  DenseLayout psi;
};

struct TensorInfo {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;

  std::size_t size() const { return rows * cols; }
};

struct AdamWState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  bool operator==(const AdamWState&) const = default;
};

/// All trainable weights live in one flat row-major buffer; tensors() names the slices.
class ModelParams {
 public:
  /// Zero weights and zero optimizer state.
  explicit ModelParams(ModelConfig config);

  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero, seeded by config.seed.
  static ModelParams initialize(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  const std::vector<TensorInfo>& tensors() const { return tensors_; }
  std::span<double> tensor(std::string_view name);
  std::span<const double> tensor(std::string_view name) const;

  const DenseLayout& encoder() const { return encoder_; }
  std::size_t head_index(Level level) const;
  const HeadLayout& head(Level level) const { return heads_[head_index(level)]; }

  AdamWState& optimizer() { return opt_; }
  const AdamWState& optimizer() const { return opt_; }

  bool operator==(const ModelParams& other) const {
    return config_ == other.config_ && values_ == other.values_ && opt_ == other.opt_;
  }

 private:
  DenseLayout add_dense(const std::string& prefix, std::size_t rows, std::size_t cols);

  ModelConfig config_;
  DenseLayout encoder_;
  std::vector<HeadLayout> heads_;
  std::vector<TensorInfo> tensors_;
  std::vector<double> values_;
  AdamWState opt_;
};

/// Frame representation: vision features followed by utterance features.
FeatureVector encode_frame(const FeatureVector& vision_feat, const FeatureVector& text_feat);
/// Same, checking the dimensions against the config.
FeatureVector encode_frame(const ModelConfig& config, const FeatureVector& vision_feat,
                           const FeatureVector& text_feat);

/// Element-wise mean; order-invariant. Throws on an empty list or ragged dims.
FeatureVector pool_group(std::span<const FeatureVector> members);

Logits phi_forward(const ModelParams& params, Level level, const FeatureVector& a, const FeatureVector& b);

/// Unit-norm projection. Throws NumericalError if the projection is the zero vector.
FeatureVector psi_forward(const ModelParams& params, Level level, const FeatureVector& x);

/// Softmax cross-entropy of `logits` against class `order_label` (0 or 1).
double loss_cls(const Logits& logits, int order_label);

/// InfoNCE over already-projected embeddings:
/// -log(exp(a.p) / (exp(a.p) + sum_k exp(a.q_k))).
double loss_cl(const FeatureVector& anchor, const FeatureVector& positive, std::span<const FeatureVector> negatives);

/// An ordered pair from one hierarchy level plus contrastive negatives.
struct TrainingPair {
  Level level = Level::frame;
  FeatureVector a;
  FeatureVector b;
  int order_label = 0;  // 1 when a precedes b
  std::vector<FeatureVector> negatives;
  /// a and b belong to the same group (shot for frames, scene for shots, clip for
  /// scenes); the contrastive term only attracts such pairs.
  bool same_group = true;
};

struct LossParts {
  double cls = 0.0;
  double cl = 0.0;
  double total = 0.0;
};

/// cls + lambda * cl, with the contrastive term masked when !pair.same_group.
LossParts loss_total(const TrainingPair& pair, const ModelParams& params, double lambda);

struct Gradient {
  std::vector<double> values;  // same layout as ModelParams::values()
  LossParts loss;              // batch mean
};

/// Analytic gradient of the mean loss_total over `batch`.
/// Throws NumericalError on a non-finite loss or gradient.
Gradient backward(std::span<const TrainingPair> batch, const ModelParams& params, double lambda);

/// Decoupled-weight-decay Adam update using config lr/betas/eps/weight_decay.
void adamw_step(ModelParams& params, std::span<const double> gradient);

// ---------------------------------------------------------------------------
// Pair sampling

/// A level representation with its grouping key and temporal key.
struct LevelItem {
  FeatureVector rep;
  std::int64_t group = 0;  // shot_id for frames, scene_id for shots, 0 for scenes
  int order_key = 0;       // smallest gt_index covered
};

/// Frame reps are encode_frame outputs, shots pool their frames, scenes pool their shots.
std::vector<LevelItem> level_items(const ClipPuzzle& clip, Level level);

struct PairSample {
  std::vector<TrainingPair> pairs;
  std::size_t skipped_clips = 0;   // clips with fewer than two items at this level
  std::size_t skipped_pairs = 0;   // pairs with no negative pool anywhere
};

/// Per clip, each item draws one partner (from its own group with probability
/// 1/2 when possible); unordered pairs are de-duplicated and emitted in both
/// orders with complementary labels. Negatives come from other groups of the
/// same clip, falling back to other clips. Deterministic given `seed`.
PairSample sample_pairs(std::span<const ClipPuzzle> clips, const ModelConfig& config, Level level,
                        std::uint64_t seed);

// ---------------------------------------------------------------------------
// Training

struct LossRecord {
  std::size_t epoch = 0;  // 1-based
  std::size_t step = 0;   // 1-based optimizer step
  double cls = 0.0;
  double cl = 0.0;
  double total = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<LossRecord> trace;
  std::size_t skipped_clips = 0;
};

using TrainProgress = std::function<void(const LossRecord&)>;

/// Joint training over frame, shot and scene pairs with AdamW.
/// Throws NumericalError naming the step if the loss diverges.
TrainResult train(std::span<const ClipPuzzle> clips, const ModelConfig& config, const TrainProgress& progress = {});

/// CSV: epoch,step,loss_cls,loss_cl,loss_total
std::string loss_trace_csv(std::span<const LossRecord> trace);

/// Fraction of pairs whose argmax phi class equals the label.
double pairwise_accuracy(const ModelParams& params, std::span<const TrainingPair> pairs);

// ---------------------------------------------------------------------------
// Checkpoints: "HCMCCKPT", u32 version, config JSON, tensor table, step,
// then values, first and second moments as little-endian doubles.

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string checkpoint_bytes(const ModelParams& params);
ModelParams checkpoint_from_bytes(std::string_view bytes);
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace hcmc
