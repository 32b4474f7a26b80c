#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hcmc/align.hpp"
#include "hcmc/clip_io.hpp"
#include "hcmc/datagen.hpp"
#include "hcmc/errors.hpp"
#include "hcmc/evaluation.hpp"
#include "hcmc/inference.hpp"
#include "hcmc/model.hpp"
#include "hcmc/rng.hpp"
#include "hcmc/splits.hpp"
#include "hcmc/srt.hpp"
#include "manifest.hpp"

namespace hcmc::cli {

namespace fs = std::filesystem;

namespace {

/// Raised for bad flag values discovered after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path default_data_dir() {
  if (const char* env = std::getenv("HCMC_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return "data";
}

SplitRatios parse_ratios(const std::vector<double>& r) {
  if (r.size() != 4) throw UsageError("--ratios takes four values: train val test_in test_out");
  SplitRatios out{r[0], r[1], r[2], r[3]};
  try {
    out.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return out;
}

/// Split files named by split; a directory expands to whichever split files exist.
std::vector<std::pair<std::string, fs::path>> split_inputs(const std::vector<fs::path>& paths) {
  std::vector<std::pair<std::string, fs::path>> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      for (auto name : kSplitNames) {
        const auto file = p / (std::string(name) + ".jsonl");
        if (fs::exists(file)) out.emplace_back(std::string(name), file);
      }
    } else {
      out.emplace_back(p.stem().string(), p);
    }
  }
  if (out.empty()) throw IoError(paths.empty() ? fs::path(".") : paths.front(), "no split files found");
  return out;
}

struct ModelFlags {
  double lr = ModelConfig{}.lr;
  std::size_t batch_size = ModelConfig{}.batch_size;
  std::size_t epochs = ModelConfig{}.epochs;
  double lambda = ModelConfig{}.lambda;
  std::size_t hidden_dim = ModelConfig{}.hidden_dim;
  std::size_t proj_dim = ModelConfig{}.proj_dim;
  std::size_t negatives = ModelConfig{}.n_negatives;
  double weight_decay = ModelConfig{}.weight_decay;
  bool shared_heads = false;
};

struct InferFlags {
  std::string level_mode = "frame_shot_scene";
  std::size_t bsize = InferenceConfig{}.bsize;
  std::size_t max_cluster_steps = ClusterConfig{}.max_steps;
  std::string cluster_distance = "euclidean";
  std::string counts = "oracle";
  std::size_t n_scenes = 1;
  std::size_t n_shots = 1;
  std::size_t restarts = ClusterConfig{}.restarts;

  InferenceConfig resolve(std::uint64_t seed) const {
    InferenceConfig cfg;
    try {
      cfg.level_mode = parse_level_mode(level_mode);
      cfg.cluster.distance = parse_distance(cluster_distance);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    cfg.bsize = bsize;
    cfg.cluster.max_steps = max_cluster_steps;
    cfg.cluster.restarts = restarts;
    cfg.cluster.seed = derive_seed(seed, "infer.cluster");
    if (counts == "fixed") {
      cfg.counts = CountSource::fixed;
    } else if (counts != "oracle") {
      throw UsageError("--counts must be oracle or fixed");
    }
    cfg.n_scenes = n_scenes;
    cfg.n_shots_per_scene = n_shots;
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

void add_infer_flags(CLI::App* app, InferFlags& f) {
  app->add_option("--level-mode", f.level_mode, "frame_only | frame_shot | frame_scene | frame_shot_scene")
      ->capture_default_str();
  app->add_option("--bsize", f.bsize, "Beam width")->capture_default_str();
  app->add_option("--max-cluster-steps", f.max_cluster_steps, "k-means iterations per restart")
      ->capture_default_str();
  app->add_option("--cluster-distance", f.cluster_distance, "euclidean | cosine")->capture_default_str();
  app->add_option("--cluster-restarts", f.restarts, "k-means restarts")->capture_default_str();
  app->add_option("--counts", f.counts, "Cluster counts: oracle (clip labels) or fixed")->capture_default_str();
  app->add_option("--n-scenes", f.n_scenes, "Scene count for --counts fixed")->capture_default_str();
  app->add_option("--n-shots", f.n_shots, "Shots per scene for --counts fixed")->capture_default_str();
}

nlohmann::json options_json(const CLI::App* app) {
  nlohmann::json j = nlohmann::json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    const auto& res = opt->results();
    if (!res.empty()) {
      j[name] = res.size() == 1 ? nlohmann::json(res.front()) : nlohmann::json(res);
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

/// Turns a JSON object into flags for `sub`, skipping flags already in `explicit_args`.
std::vector<std::string> config_args(const fs::path& path, const CLI::App* sub,
                                     const std::vector<std::string>& explicit_args) {
  const std::set<std::string> given(explicit_args.begin(), explicit_args.end());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError(path.string() + ": config must be a JSON object");
  std::vector<std::string> out;
  for (const auto& [key, value] : j.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    const CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option(flag);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError(path.string() + ": unknown setting '" + key + "' for " + sub->get_name());
    }
    if (given.contains(flag)) continue;
    if (opt->get_type_size() == 0) {
      if (value.is_boolean() && value.get<bool>()) out.push_back(flag);
      continue;
    }
    auto scalar = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    out.push_back(flag);
    if (value.is_array()) {
      for (const auto& v : value) out.push_back(scalar(v));
    } else {
      out.push_back(scalar(value));
    }
  }
  return out;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args);

 private:
  void build(CLI::App& app);
  void finish(const CLI::App* sub, const fs::path& manifest_path);

  void gen();
  void ingest();
  void train();
  void infer();
  void eval();
  int oracle();
  void report();

  std::ostream& out_;
  std::ostream& err_;
  std::vector<std::string> args_;
  RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;

  std::uint64_t seed_ = 0;
  std::string config_path_;
  std::string manifest_path_;
  fs::path out_dir_;
  std::vector<double> ratios_{0.70, 0.06, 0.12, 0.12};

  // gen
  std::size_t clips_ = 1000;
  std::size_t clips_per_movie_ = 10;
  std::uint64_t world_seed_ = 0;
  GenConfig gen_;
  std::vector<std::size_t> shape_;

  // ingest
  fs::path input_dir_;
  AlignConfig align_;
  SegmentConfig segment_;

  // train / infer / eval
  std::vector<fs::path> data_;
  fs::path model_path_;
  fs::path out_file_;
  fs::path per_clip_;
  std::string pred_;
  std::vector<int> betas_{2, 3};
  std::size_t jobs_ = 1;
  ModelFlags mf_;
  InferFlags if_;

  // oracle / report
  std::size_t seeds_ = 50;
  std::vector<fs::path> inputs_;
};

void Runner::build(CLI::App& app) {
  app.require_subcommand(1);
  auto common = [this](CLI::App* sub) {
    sub->add_option("--seed", seed_, "Root seed; every random stream derives from it")->capture_default_str();
    sub->add_option("--config", config_path_, "JSON object of flag values; explicit flags override");
    sub->add_option("--manifest", manifest_path_, "Where to write the run manifest");
  };

  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset split into train/val/test_in/test_out");
  common(gen);
  gen->add_option("--clips", clips_, "Number of clips")->capture_default_str();
  gen->add_option("--clips-per-movie", clips_per_movie_, "Clips per synthetic movie")->capture_default_str();
  gen->add_option("--world-seed", world_seed_, "Seed of the shared temporal direction and text map")
      ->capture_default_str();
  gen->add_option("--shape", shape_, "Single clip shape: scenes shots-per-scene frames-per-shot")
      ->expected(3);
  gen->add_option("--d-v", gen_.d_v, "Vision feature dimension")->capture_default_str();
  gen->add_option("--d-u", gen_.d_u, "Text feature dimension")->capture_default_str();
  gen->add_option("--scene-sep", gen_.scene_sep)->capture_default_str();
  gen->add_option("--shot-sep", gen_.shot_sep)->capture_default_str();
  gen->add_option("--drift", gen_.drift, "Temporal drift per frame index")->capture_default_str();
  gen->add_option("--noise", gen_.noise, "Feature noise std")->capture_default_str();
  gen->add_option("--pair-rate", gen_.pair_rate, "Fraction of frames with text")->capture_default_str();
  gen->add_option("--ratios", ratios_, "train val test_in test_out")->expected(4);
  gen->add_option("--out", out_dir_, "Output directory (default $HCMC_DATA_DIR or ./data)");

  auto* ingest = app.add_subcommand("ingest", "Build clips from <movie>.srt + <movie>.frames.csv pairs");
  common(ingest);
  ingest->add_option("--input", input_dir_, "Directory of subtitle and frame manifest pairs")->required();
  ingest->add_option("--keep-gap-ms", align_.keep_gap_ms, "Keep uncovered frames bridging longer gaps")
      ->capture_default_str();
  ingest->add_option("--max-gap-ms", segment_.max_gap_ms, "Clips never span a longer gap")->capture_default_str();
  ingest->add_option("--d-u", segment_.d_u, "Hashed text feature dimension")->capture_default_str();
  ingest->add_option("--ratios", ratios_, "train val test_in test_out")->expected(4);
  ingest->add_option("--out", out_dir_, "Output directory (default $HCMC_DATA_DIR or ./data)");

  auto* train = app.add_subcommand("train", "Train the pairwise order model");
  common(train);
  train->add_option("--data", data_, "Training JSONL (default <data dir>/train.jsonl)");
  train->add_option("--lr", mf_.lr, "AdamW learning rate")->capture_default_str();
  train->add_option("--batch-size", mf_.batch_size)->capture_default_str();
  train->add_option("--epochs", mf_.epochs)->capture_default_str();
  train->add_option("--lambda", mf_.lambda, "Contrastive loss weight")->capture_default_str();
  train->add_option("--hidden-dim", mf_.hidden_dim)->capture_default_str();
  train->add_option("--proj-dim", mf_.proj_dim)->capture_default_str();
  train->add_option("--negatives", mf_.negatives, "Contrastive negatives per pair")->capture_default_str();
  train->add_option("--weight-decay", mf_.weight_decay)->capture_default_str();
  train->add_flag("--shared-heads", mf_.shared_heads, "One phi/psi head for all levels");
  train->add_option("--out", out_dir_, "Output directory for model.ckpt and loss.csv")->required();

  auto* infer = app.add_subcommand("infer", "Predict clip orders with a trained model");
  common(infer);
  infer->add_option("--model", model_path_, "Checkpoint")->required();
  infer->add_option("--data", data_, "Clips JSONL")->required();
  infer->add_option("--out", out_file_, "Predictions JSONL")->required();
  infer->add_option("--jobs", jobs_, "Parallel clips")->capture_default_str();
  add_infer_flags(infer, if_);

  auto* eval = app.add_subcommand("eval", "Score predictions per split and beta");
  common(eval);
  eval->add_option("--data", data_, "Split JSONL files or dataset directories");
  eval->add_option("--pred", pred_, "identity | random | predictions JSONL");
  eval->add_option("--model", model_path_, "Checkpoint to run inference with instead of --pred");
  eval->add_option("--betas", betas_, "Subset sizes")->capture_default_str();
  eval->add_option("--out", out_file_, "Metric table CSV (default stdout)");
  eval->add_option("--per-clip", per_clip_, "Per-clip score CSV");
  eval->add_option("--jobs", jobs_, "Parallel clips")->capture_default_str();
  add_infer_flags(eval, if_);

  auto* oracle = app.add_subcommand("oracle", "Cross-check fast paths against brute-force references");
  common(oracle);
  oracle->add_option("--seeds", seeds_, "Number of seeded cases")->capture_default_str();

  auto* report = app.add_subcommand("report", "Merge metric tables into one summary");
  common(report);
  report->add_option("--inputs", inputs_, "Metric CSVs from eval")->required();
  report->add_option("--out", out_file_, "Summary CSV (default stdout)");
}

void Runner::finish(const CLI::App* sub, const fs::path& manifest_path) {
  manifest_.command = sub->get_name();
  manifest_.args = args_;
  manifest_.config = options_json(sub);
  manifest_.seed = seed_;
  manifest_.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  write_manifest(manifest_path, manifest_);
}

void Runner::gen() {
  const fs::path dir = out_dir_.empty() ? default_data_dir() : out_dir_;
  GenConfig base = gen_;
  base.world_seed = world_seed_;
  DatasetConfig cfg;
  if (shape_.empty()) {
    cfg.shapes = default_shapes(base);
  } else {
    base.n_scenes = shape_[0];
    base.shots_per_scene = shape_[1];
    base.frames_per_shot = shape_[2];
    cfg.shapes = {base};
  }
  cfg.n_clips = clips_;
  cfg.clips_per_movie = clips_per_movie_;
  cfg.ratios = parse_ratios(ratios_);
  cfg.seed = seed_;
  try {
    for (const auto& s : cfg.shapes) s.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto splits = generate_dataset(cfg);
  for (auto name : kSplitNames) {
    const auto path = dir / (std::string(name) + ".jsonl");
    write_clips_jsonl(path, splits.by_name(name));
    manifest_.outputs.push_back(path);
    out_ << name << ": " << splits.by_name(name).size() << " clips -> " << path.string() << "\n";
  }
  write_text_file(dir / "dataset.json", dataset_manifest_json(cfg) + "\n");
  manifest_.outputs.push_back(dir / "dataset.json");
}

void Runner::ingest() {
  const fs::path dir = out_dir_.empty() ? default_data_dir() : out_dir_;
  if (!fs::is_directory(input_dir_)) throw IoError(input_dir_, "not a directory");
  std::vector<fs::path> srts;
  for (const auto& e : fs::directory_iterator(input_dir_)) {
    if (e.path().extension() == ".srt") srts.push_back(e.path());
  }
  std::sort(srts.begin(), srts.end());
  if (srts.empty()) throw IoError(input_dir_, "no .srt files");
  const SplitRatios ratios = parse_ratios(ratios_);

  std::vector<ClipPuzzle> clips;
  IngestStats stats;
  for (const auto& srt : srts) {
    const std::string movie = srt.stem().string();
    const fs::path frames_path = input_dir_ / (movie + ".frames.csv");
    manifest_.inputs.push_back(srt);
    manifest_.inputs.push_back(frames_path);
    SrtDocument doc;
    try {
      doc = parse_srt(read_text_file(srt));
    } catch (const SrtParseError& e) {
      throw IoError(srt, e.what());
    }
    for (const auto& w : doc.warnings) err_ << srt.string() << ": warning: " << w << "\n";
    auto res = ingest_movie(movie, doc.cues, read_frame_manifest(frames_path), align_, segment_);
    stats.merge(res.stats);
    for (auto& c : res.clips) clips.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < clips.size(); ++i) {
    clips[i] = shuffle_clip(clips[i], derive_seed(seed_, "ingest.shuffle", i));
  }
  const auto splits = split_dataset(clips, ratios, derive_seed(seed_, "split"));
  for (auto name : kSplitNames) {
    const auto path = dir / (std::string(name) + ".jsonl");
    write_clips_jsonl(path, splits.by_name(name));
    manifest_.outputs.push_back(path);
  }
  write_text_file(dir / "ingest_stats.json", stats.to_json() + "\n");
  manifest_.outputs.push_back(dir / "ingest_stats.json");
  out_ << stats.clips << " clips from " << srts.size() << " movies -> " << dir.string() << "\n";
}

void Runner::train() {
  const fs::path data = data_.empty() ? default_data_dir() / "train.jsonl" : data_.front();
  manifest_.inputs.push_back(data);
  const auto clips = read_clips_jsonl(data);
  if (clips.empty()) throw UsageError("no training clips in " + data.string());
  ModelConfig cfg;
  cfg.d_v = clips.front().frames.front().vision_feat.size();
  cfg.d_u = clips.front().frames.front().text_feat.size();
  cfg.lr = mf_.lr;
  cfg.batch_size = mf_.batch_size;
  cfg.epochs = mf_.epochs;
  cfg.lambda = mf_.lambda;
  cfg.hidden_dim = mf_.hidden_dim;
  cfg.proj_dim = mf_.proj_dim;
  cfg.n_negatives = mf_.negatives;
  cfg.weight_decay = mf_.weight_decay;
  cfg.per_level_heads = !mf_.shared_heads;
  cfg.seed = seed_;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::size_t last_epoch = 0;
  double epoch_sum = 0.0;
  std::size_t epoch_steps = 0;
  auto report_epoch = [&] {
    if (epoch_steps == 0) return;
    char line[96];
    std::snprintf(line, sizeof line, "epoch %zu: mean loss %.6f over %zu steps\n", last_epoch,
                  epoch_sum / static_cast<double>(epoch_steps), epoch_steps);
    out_ << line << std::flush;
  };
  auto result = hcmc::train(clips, cfg, [&](const LossRecord& r) {
    if (r.epoch != last_epoch) {
      report_epoch();
      last_epoch = r.epoch;
      epoch_sum = 0.0;
      epoch_steps = 0;
    }
    epoch_sum += r.total;
    ++epoch_steps;
  });
  report_epoch();
  if (result.skipped_clips > 0) err_ << "note: " << result.skipped_clips << " clip levels had fewer than two items\n";

  const fs::path ckpt = out_dir_ / "model.ckpt";
  const fs::path loss = out_dir_ / "loss.csv";
  save_checkpoint(ckpt, result.params);
  write_text_file(loss, loss_trace_csv(result.trace));
  manifest_.outputs = {ckpt, loss};
  out_ << "checkpoint -> " << ckpt.string() << "\n";
}

void Runner::infer() {
  manifest_.inputs = {model_path_, data_.front()};
  const ModelParams params = load_checkpoint(model_path_);
  const InferenceConfig cfg = if_.resolve(seed_);
  auto clips = read_clips_jsonl(data_.front());
  std::sort(clips.begin(), clips.end(), [](const auto& a, const auto& b) { return a.clip_id < b.clip_id; });

  std::vector<std::string> lines(clips.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < clips.size(); i = next++) {
      try {
        lines[i] = prediction_to_json(clips[i], infer_order(clips[i], params, cfg));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = clips.size();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t j = 1; j < std::clamp<std::size_t>(jobs_, 1, clips.size() + 1); ++j) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  write_text_file(out_file_, text);
  manifest_.outputs = {out_file_};
  out_ << clips.size() << " predictions -> " << out_file_.string() << "\n";
}

void Runner::eval() {
  const auto inputs = split_inputs(data_.empty() ? std::vector<fs::path>{default_data_dir()} : data_);
  std::optional<ModelParams> params;
  Predictor predictor;
  if (!model_path_.empty()) {
    if (!pred_.empty()) throw UsageError("--pred and --model are mutually exclusive");
    params = load_checkpoint(model_path_);
    manifest_.inputs.push_back(model_path_);
    predictor = model_predictor(*params, if_.resolve(seed_));
  } else if (pred_.empty() || pred_ == "identity") {
    predictor = identity_predictor();
  } else if (pred_ == "random") {
    predictor = random_predictor(seed_);
  } else {
    std::vector<Prediction> preds;
    std::istringstream in(read_text_file(pred_));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) preds.push_back(prediction_from_json(line));
    }
    predictor = table_predictor(std::move(preds));
    manifest_.inputs.push_back(pred_);
  }
  for (int b : betas_) {
    if (b < 2) throw UsageError("--betas values must be >= 2");
  }

  std::vector<SplitRow> rows;
  std::string per_clip;
  for (const auto& [split, path] : inputs) {
    manifest_.inputs.push_back(path);
    const auto clips = read_clips_jsonl(path);
    if (clips.empty()) throw UsageError("split '" + split + "' is empty");
    const auto scores = score_clips(clips, predictor, betas_, jobs_);
    for (auto& r : summarize_split(split, scores, betas_)) rows.push_back(std::move(r));
    auto csv = clip_scores_csv(scores, betas_);
    if (!per_clip.empty()) csv = csv.substr(csv.find('\n') + 1);
    per_clip += csv;
  }
  const std::string table = split_table_csv(rows);
  if (out_file_.empty()) {
    out_ << table;
  } else {
    write_text_file(out_file_, table);
    manifest_.outputs.push_back(out_file_);
  }
  if (!per_clip_.empty()) {
    write_text_file(per_clip_, per_clip);
    manifest_.outputs.push_back(per_clip_);
  }
}

int Runner::oracle() {
  const auto report = run_oracle_checks(seed_, seeds_);
  out_ << report.checks << " checks, " << report.failures.size() << " failures\n";
  for (const auto& f : report.failures) out_ << "FAIL " << f << "\n";
  return report.failures.empty() ? kExitOk : kExitOracleMismatch;
}

void Runner::report() {
  std::string out = "run,split,beta,n_clips,score,scene_iou,shot_iou\n";
  for (const auto& path : inputs_) {
    manifest_.inputs.push_back(path);
    std::istringstream in(read_text_file(path));
    std::string line;
    std::getline(in, line);
    if (!line.starts_with("split,beta,n_clips,score")) throw IoError(path, "not an eval metric table");
    while (std::getline(in, line)) {
      if (!line.empty()) out += path.stem().string() + "," + line + "\n";
    }
  }
  if (out_file_.empty()) {
    out_ << out;
  } else {
    write_text_file(out_file_, out);
    manifest_.outputs.push_back(out_file_);
  }
}

int Runner::run(const std::vector<std::string>& args) {
  start_ = std::chrono::steady_clock::now();
  args_ = args;
  CLI::App app("Hierarchical clip reordering toolkit", "hcmc");
  build(app);

  std::vector<std::string> argv = args;
  try {
    // A --config file is expanded into flags ahead of the explicit ones.
    if (!argv.empty()) {
      for (std::size_t i = 1; i + 1 < argv.size(); ++i) {
        if (argv[i] != "--config") continue;
        const CLI::App* sub = nullptr;
        for (const CLI::App* candidate : app.get_subcommands({})) {
          if (candidate->get_name() == argv[0]) sub = candidate;
        }
        if (sub == nullptr) break;
        auto extra = config_args(argv[i + 1], sub, argv);
        argv.insert(argv.begin() + 1, extra.begin(), extra.end());
        break;
      }
    }
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out_, err_);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err_ << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err_ << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err_ << "error: " << e.what() << "\n";
    return kExitIo;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string cmd = sub->get_name();
  int code = kExitOk;
  try {
    if (cmd == "gen") gen();
    if (cmd == "ingest") ingest();
    if (cmd == "train") train();
    if (cmd == "infer") infer();
    if (cmd == "eval") eval();
    if (cmd == "oracle") code = oracle();
    if (cmd == "report") report();

    fs::path manifest_path = manifest_path_;
    if (manifest_path.empty()) {
      if (cmd == "gen" || cmd == "ingest") {
        manifest_path = (out_dir_.empty() ? default_data_dir() : out_dir_) / (cmd + ".manifest.json");
      } else if (cmd == "train") {
        manifest_path = out_dir_ / "train.manifest.json";
      } else if (!out_file_.empty()) {
        manifest_path = out_file_.string() + ".manifest.json";
      } else {
        manifest_path = cmd + ".manifest.json";
      }
    }
    finish(sub, manifest_path);
  } catch (const UsageError& e) {
    err_ << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err_ << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericalError& e) {
    err_ << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err_ << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Runner(out, err).run(args);
}

}  // namespace hcmc::cli
