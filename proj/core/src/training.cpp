#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "hcmc/errors.hpp"
#include "hcmc/model.hpp"
#include "hcmc/rng.hpp"

namespace hcmc {

TrainResult train(std::span<const ClipPuzzle> clips, const ModelConfig& config, const TrainProgress& progress) {
  config.validate();
  if (clips.empty()) throw std::invalid_argument("train: empty training set");

  TrainResult result{ModelParams::initialize(config), {}, 0};
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<TrainingPair> pairs;
    for (Level level : kAllLevels) {
      auto sample = sample_pairs(clips, config, level,
                                 derive_seed(config.seed, "pairs." + std::string(level_name(level)), epoch));
      if (epoch == 1) result.skipped_clips += sample.skipped_clips;
      std::move(sample.pairs.begin(), sample.pairs.end(), std::back_inserter(pairs));
    }
    Rng order_rng(derive_seed(config.seed, "batches", epoch));
    std::shuffle(pairs.begin(), pairs.end(), order_rng);

    for (std::size_t start = 0; start < pairs.size(); start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, pairs.size() - start);
      ++step;
      Gradient grad;
      try {
        grad = backward(std::span<const TrainingPair>(pairs).subspan(start, len), result.params, config.lambda);
      } catch (const NumericalError& e) {
        throw NumericalError("training diverged at epoch " + std::to_string(epoch) + ", step " +
                             std::to_string(step) + ": " + e.what());
      }
      adamw_step(result.params, grad.values);
      LossRecord rec{epoch, step, grad.loss.cls, grad.loss.cl, grad.loss.total};
      result.trace.push_back(rec);
      if (progress) progress(rec);
    }
  }
  return result;
}

std::string loss_trace_csv(std::span<const LossRecord> trace) {
  std::string out = "epoch,step,loss_cls,loss_cl,loss_total\n";
  char line[160];
  for (const auto& r : trace) {
    std::snprintf(line, sizeof line, "%zu,%zu,%.9g,%.9g,%.9g\n", r.epoch, r.step, r.cls, r.cl, r.total);
    out += line;
  }
  return out;
}

double pairwise_accuracy(const ModelParams& params, std::span<const TrainingPair> pairs) {
  if (pairs.empty()) throw std::invalid_argument("pairwise_accuracy: no pairs");
  std::size_t correct = 0;
  for (const auto& p : pairs) {
    const auto logits = phi_forward(params, p.level, p.a, p.b);
    const int predicted = logits[1] > logits[0] ? 1 : 0;
    if (predicted == p.order_label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

}  // namespace hcmc
