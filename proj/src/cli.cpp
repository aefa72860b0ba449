#include "accentnet/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "accentnet/dataset.hpp"
#include "accentnet/dsp.hpp"
#include "accentnet/eval.hpp"
#include "accentnet/io_util.hpp"
#include "accentnet/models.hpp"
#include "accentnet/train.hpp"

namespace accentnet::cli {

namespace fs = std::filesystem;

namespace {

struct DspFlags {
  double alpha = 0.97;
  int frame_len = 2048;
  int hop = 512;
  int n_fft = 2048;
  int n_mels = 128;
  int n_mfcc = 64;
  double mel_constant = 2995.0;
  int rate = 44100;
  double duration = 6.0;

  dsp::DspConfig config() const {
    dsp::DspConfig cfg;
    cfg.alpha = alpha;
    cfg.frame_len = frame_len;
    cfg.hop = hop;
    cfg.n_fft = n_fft;
    cfg.n_mels = n_mels;
    cfg.n_mfcc = n_mfcc;
    cfg.mel_constant = mel_constant;
    return cfg;
  }

  std::string canonical_string() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), ";rate=%d;duration=%.6g", rate, duration);
    return config().canonical_string() + buf;
  }

  void register_flags(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "Pre-emphasis factor");
    cmd->add_option("--frame-len", frame_len, "Analysis frame length in samples");
    cmd->add_option("--hop", hop, "Hop length in samples");
    cmd->add_option("--n-fft", n_fft, "FFT size (power of two)");
    cmd->add_option("--n-mels", n_mels, "Mel filter count");
    cmd->add_option("--n-mfcc", n_mfcc, "Kept MFCC coefficients");
    cmd->add_option("--mel-constant", mel_constant, "Multiplier of the mel(f) formula");
    cmd->add_option("--rate", rate, "Standardized sample rate in Hz");
    cmd->add_option("--duration", duration, "Standardized clip duration in seconds");
  }
};

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

// Deterministic per-file parallelism: results land in index-ordered slots and
// are reported in manifest order regardless of thread scheduling.
struct FileOutcome {
  bool ok = true;
  std::string message;
};

template <typename Fn>
std::vector<FileOutcome> parallel_over_files(std::size_t n, Fn&& fn) {
  std::vector<FileOutcome> outcomes(n);
  const unsigned workers =
      std::max(1u, std::min({std::thread::hardware_concurrency(), 8u,
                             static_cast<unsigned>(n == 0 ? 1 : n)}));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (const Error& e) {
          outcomes[i] = {false, e.what()};
        } catch (const std::exception& e) {
          outcomes[i] = {false, e.what()};
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  return outcomes;
}

// Cache file name: <stem>__<hash>.mfc where the hash covers the audio bytes
// and the full extraction configuration.
std::string cache_file_for(const std::string& cache_dir, const std::string& audio_path,
                           const std::string& wav_bytes, const DspFlags& flags) {
  const std::uint64_t h = io::fnv1a(flags.canonical_string(), io::fnv1a(wav_bytes));
  return (fs::path(cache_dir) / (stem_of(audio_path) + "__" + io::hex64(h) + ".mfc")).string();
}

std::string resolve_cache_dir(std::string flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("ACCENTNET_CACHE")) return env;
  usage_error("no cache directory: pass --cache-dir or set ACCENTNET_CACHE");
}

std::vector<eval::LabeledExample> load_features(const std::vector<dataset::SampleRecord>& records,
                                                const std::string& cache_dir,
                                                const DspFlags& flags) {
  std::vector<eval::LabeledExample> out(records.size());
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    const std::string wav_bytes = io::read_file(rec.audio_path);
    const std::string cache_path = cache_file_for(cache_dir, rec.audio_path, wav_bytes, flags);
    if (!fs::exists(cache_path)) {
      missing.push_back(rec.audio_path);
      continue;
    }
    out[i].features = dsp::read_feature_cache(cache_path);
    out[i].labels = {rec.accent, rec.gender, rec.age_group};
  }
  if (!missing.empty()) {
    std::string names;
    for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 8); ++i)
      names += (i ? ", " : "") + missing[i];
    data_error("feature cache missing for " + std::to_string(missing.size()) +
               " record(s): " + names + (missing.size() > 8 ? ", ..." : "") +
               " (run the extract command first)");
  }
  return out;
}

std::uint64_t config_hash(const std::string& canonical) { return io::fnv1a(canonical); }

// ---------------------------------------------------------------------------
// preprocess
// ---------------------------------------------------------------------------

struct PreprocessArgs {
  std::string manifest;
  std::string out_dir;
  int augment = 0;
  double noise_sigma = 10.0;
  std::uint64_t seed = 0;
  bool keep_going = false;
  DspFlags dsp;
};

int cmd_preprocess(const PreprocessArgs& args, std::ostream& out) {
  const auto manifest = dataset::load_manifest(args.manifest);
  for (const auto& w : manifest.warnings) out << "warning: " << w << "\n";
  fs::create_directories(args.out_dir);

  const std::string canonical = "preprocess;" + args.dsp.canonical_string() +
                                ";augment=" + std::to_string(args.augment) +
                                ";sigma=" + std::to_string(args.noise_sigma) +
                                ";seed=" + std::to_string(args.seed);
  out << "config hash: " << io::hex64(config_hash(canonical)) << "\n";

  // collision check up front: output names come from path stems
  {
    std::vector<std::string> stems;
    for (const auto& rec : manifest.records) stems.push_back(stem_of(rec.audio_path));
    auto sorted = stems;
    std::sort(sorted.begin(), sorted.end());
    const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end())
      data_error("duplicate output stem '" + *dup + "': manifest stems must be unique");
  }

  std::vector<std::vector<dataset::SampleRecord>> produced(manifest.records.size());
  auto outcomes = parallel_over_files(manifest.records.size(), [&](std::size_t i) {
    const auto& rec = manifest.records[i];
    const auto clip = dataset::load_wav(rec.audio_path);
    const auto standardized = dataset::standardize(clip, args.dsp.rate, args.dsp.duration);
    const std::string base = stem_of(rec.audio_path);
    const std::string std_path = (fs::path(args.out_dir) / (base + ".wav")).string();
    dataset::write_wav_pcm16(standardized, std_path);
    produced[i].push_back({std_path, rec.accent, rec.age_group, rec.gender});
    for (int k = 1; k <= args.augment; ++k) {
      const std::uint64_t noise_seed =
          rng::mix(args.seed, rng::mix(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(k)));
      const auto noisy = dataset::add_gaussian_noise(standardized, args.noise_sigma, noise_seed);
      const std::string aug_path =
          (fs::path(args.out_dir) / (base + "_aug" + std::to_string(k) + ".wav")).string();
      dataset::write_wav_pcm16(noisy, aug_path);
      produced[i].push_back({aug_path, rec.accent, rec.age_group, rec.gender});
    }
  });

  std::size_t failures = 0;
  std::string out_manifest = "path,accent,age_group,gender\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].ok) {
      ++failures;
      out << "failed: " << manifest.records[i].audio_path << ": " << outcomes[i].message << "\n";
      if (!args.keep_going) data_error(outcomes[i].message);
      continue;
    }
    for (const auto& rec : produced[i])
      out_manifest += rec.audio_path + "," + std::to_string(rec.accent) + "," +
                      std::to_string(rec.age_group) + "," + std::to_string(rec.gender) + "\n";
  }
  io::write_file_atomic((fs::path(args.out_dir) / "manifest.csv").string(), out_manifest);

  const std::size_t done = outcomes.size() - failures;
  out << done << " processed, " << failures << " failed, " << done * args.augment
      << " augmented copies\n";
  return 0;
}

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

struct ExtractArgs {
  std::string manifest;
  std::string cache_dir;
  bool keep_going = false;
  DspFlags dsp;
};

int cmd_extract(const ExtractArgs& args, std::ostream& out) {
  const auto manifest = dataset::load_manifest(args.manifest);
  for (const auto& w : manifest.warnings) out << "warning: " << w << "\n";
  const std::string cache_dir = resolve_cache_dir(args.cache_dir);
  fs::create_directories(cache_dir);
  out << "config hash: " << io::hex64(config_hash("extract;" + args.dsp.canonical_string()))
      << "\n";

  std::vector<int> status(manifest.records.size(), 0);  // 1 = extracted, 2 = cached
  auto outcomes = parallel_over_files(manifest.records.size(), [&](std::size_t i) {
    const auto& rec = manifest.records[i];
    const std::string wav_bytes = io::read_file(rec.audio_path);
    const std::string cache_path = cache_file_for(cache_dir, rec.audio_path, wav_bytes, args.dsp);
    if (fs::exists(cache_path)) {
      status[i] = 2;
      return;
    }
    const auto clip = dataset::decode_wav(wav_bytes, rec.audio_path);
    const auto standardized = dataset::standardize(clip, args.dsp.rate, args.dsp.duration);
    auto fm = dsp::mfcc(standardized, args.dsp.config());
    fm.source_id = rec.audio_path;
    dsp::write_feature_cache(fm, cache_path);
    status[i] = 1;
  });

  std::size_t extracted = 0, cached = 0, failures = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].ok) {
      ++failures;
      out << "failed: " << manifest.records[i].audio_path << ": " << outcomes[i].message << "\n";
      if (!args.keep_going) data_error(outcomes[i].message);
    } else if (status[i] == 2) {
      ++cached;
    } else {
      ++extracted;
    }
  }
  out << extracted << " extracted, " << cached << " cached, " << failures << " failed\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::string cache_dir;
  std::string out_dir = "runs";
  std::string model_id = "mpsa";
  int epochs = 128;
  int batch_size = 16;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  std::vector<double> weights;
  std::string retrain_union = "none";  // none | validation | test
  double early_stop_loss = 0.0;
  DspFlags dsp;
};

fs::path next_run_dir(const std::string& out_dir) {
  fs::create_directories(out_dir);
  for (int i = 1; i < 10000; ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "run-%03d", i);
    const fs::path dir = fs::path(out_dir) / name;
    if (!fs::exists(dir)) {
      fs::create_directories(dir);
      return dir;
    }
  }
  internal_error("run directory space exhausted");
}

int cmd_train(const TrainArgs& args, std::ostream& out) {
  const auto manifest = dataset::load_manifest(args.manifest);
  const std::string cache_dir = resolve_cache_dir(args.cache_dir);
  const auto split = dataset::split_with_augmented(manifest.records, args.seed);

  std::vector<dataset::SampleRecord> train_records = split.train;
  if (args.retrain_union == "validation") {
    train_records.insert(train_records.end(), split.validation.begin(), split.validation.end());
  } else if (args.retrain_union == "test") {
    train_records.insert(train_records.end(), split.test.begin(), split.test.end());
  } else if (args.retrain_union != "none") {
    usage_error("--retrain-union must be one of none, validation, test");
  }

  const auto schedule = models::schedule_for(args.model_id);
  train::TrainConfig cfg;
  cfg.epochs = args.epochs;
  cfg.batch_size = args.batch_size;
  cfg.learning_rate = args.learning_rate;
  cfg.seed = args.seed;
  cfg.early_stop_loss = args.early_stop_loss;
  if (!args.weights.empty()) cfg.task_weights.omega = args.weights;

  const fs::path run_dir = next_run_dir(args.out_dir);
  cfg.checkpoint_dir = run_dir.string();

  const std::string canonical = "train;model=" + args.model_id + ";" + cfg.canonical_string() +
                                ";" + args.dsp.canonical_string() +
                                ";retrain=" + args.retrain_union;
  out << "run directory: " << run_dir.string() << "\n";
  out << "model: " << args.model_id << "\n";
  out << "epochs=" << cfg.epochs << ", batch=" << cfg.batch_size << ", lr=" << cfg.learning_rate
      << ", seed=" << cfg.seed << "\n";
  out << "train/validation/test: " << train_records.size() << "/" << split.validation.size()
      << "/" << split.test.size() << "\n";
  out << "config hash: " << io::hex64(config_hash(canonical)) << "\n";
  io::write_file_atomic((run_dir / "config.txt").string(),
                        canonical + "\nhash=" + io::hex64(config_hash(canonical)) + "\n");

  const auto train_set = load_features(train_records, cache_dir, args.dsp);
  const auto val_set = load_features(split.validation, cache_dir, args.dsp);

  models::Model<float> model(schedule, args.seed);
  out << "parameters: " << model.parameter_count() << "\n";
  const auto log = train::fit(model, train_set, val_set, cfg);
  io::write_file_atomic((run_dir / "log.csv").string(), log.to_csv());

  if (!log.rows.empty()) {
    const auto& last = log.rows.back();
    out << "final epoch " << last.epoch << ": train loss " << last.train_loss;
    for (std::size_t k = 0; k < log.tasks.size(); ++k)
      out << ", " << log.tasks[k] << " train acc " << last.train_acc[k];
    out << "\n";
    out << "best epoch " << log.best_epoch << " (validation accent accuracy "
        << log.best_val_accent_acc << ")\n";
  }
  out << "log: " << (run_dir / "log.csv").string() << "\n";
  out << "checkpoints: " << (run_dir / "best.tns").string() << ", "
      << (run_dir / "last.tns").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string checkpoint;
  std::string manifest;
  std::string cache_dir;
  std::string split = "test";
  std::uint64_t seed = 0;
  double beta = 0.5;
  std::string out_dir;
  DspFlags dsp;
};

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out) {
  if (args.split != "train" && args.split != "validation" && args.split != "test")
    usage_error("--split must be one of train, validation, test (got '" + args.split + "')");

  const auto info = train::read_checkpoint_info(args.checkpoint);
  models::Model<float> model(info.schedule, info.seed);
  train::AdamState<float> state;
  (void)train::load_checkpoint(model, state, args.checkpoint);

  const auto manifest = dataset::load_manifest(args.manifest);
  const std::string cache_dir = resolve_cache_dir(args.cache_dir);
  const auto split = dataset::split_with_augmented(manifest.records, args.seed);
  const auto& records = args.split == "train"
                            ? split.train
                            : (args.split == "validation" ? split.validation : split.test);
  if (records.empty()) data_error("evaluate: split '" + args.split + "' is empty");
  const auto examples = load_features(records, cache_dir, args.dsp);

  const auto results = eval::evaluate(model, examples, args.beta);
  for (const auto& r : results) {
    std::vector<std::string> class_names;
    if (r.task == "accent")
      class_names.assign(dataset::kAccentNames, dataset::kAccentNames + dataset::kNumAccents);
    else if (r.task == "gender")
      class_names.assign(dataset::kGenderNames, dataset::kGenderNames + dataset::kNumGenders);
    else if (r.task == "age")
      class_names.assign(dataset::kAgeGroupNames,
                         dataset::kAgeGroupNames + dataset::kNumAgeGroups);
    const std::string report = eval::format_report(r.task, r.report, class_names);
    out << report << "\n";
    if (!args.out_dir.empty()) {
      fs::create_directories(args.out_dir);
      io::write_file_atomic((fs::path(args.out_dir) / (r.task + "_report.txt")).string(), report);
      io::write_file_atomic(
          (fs::path(args.out_dir) / (r.task + "_confusion.csv")).string(),
          eval::normalized_confusion_csv(r.matrix));
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

struct PredictArgs {
  std::string checkpoint;
  std::string wav_path;
  DspFlags dsp;
};

int cmd_predict(const PredictArgs& args, std::ostream& out) {
  const auto info = train::read_checkpoint_info(args.checkpoint);
  models::Model<float> model(info.schedule, info.seed);
  train::AdamState<float> state;
  (void)train::load_checkpoint(model, state, args.checkpoint);

  const auto clip = dataset::load_wav(args.wav_path);
  const auto standardized = dataset::standardize(clip, args.dsp.rate, args.dsp.duration);
  const auto fm = dsp::mfcc(standardized, args.dsp.config());

  std::vector<eval::LabeledExample> batch(1);
  batch[0].features = fm;
  NoGradGuard no_grad;
  auto logits = model.forward(eval::make_batch<float>(batch, {0}), false);

  const auto tasks = models::task_names(model.schedule());
  char line[128];
  for (std::size_t k = 0; k < logits.size(); ++k) {
    const auto probs = softmax(logits[k], 1);
    const auto pred = eval::argmax_rows(probs)[0];
    out << "task " << tasks[k] << ":\n";
    const std::size_t classes = probs.shape()[1];
    for (std::size_t c = 0; c < classes; ++c) {
      std::string name = "class " + std::to_string(c);
      if (tasks[k] == "accent" && classes == dataset::kNumAccents)
        name = dataset::kAccentNames[c];
      else if (tasks[k] == "gender" && classes == dataset::kNumGenders)
        name = dataset::kGenderNames[c];
      else if (tasks[k] == "age" && classes == dataset::kNumAgeGroups)
        name = dataset::kAgeGroupNames[c];
      std::snprintf(line, sizeof(line), "  %-14s %.4f%s\n", name.c_str(),
                    probs.values()[c], static_cast<int>(c) == pred ? "  <- predicted" : "");
      out << line;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

struct InspectArgs {
  std::string model_id;
  std::vector<int> heads;
};

int cmd_inspect(const InspectArgs& args, std::ostream& out) {
  const auto schedule = models::schedule_for(args.model_id, args.heads);
  models::validate_schedule(schedule);
  out << models::report_architecture(schedule);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2fM",
                static_cast<double>(models::count_parameters(schedule)) / 1e6);
  out << "(" << buf << ")\n";
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"accentnet: English accent classification toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a config file");

  PreprocessArgs pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "Standardize and augment WAV files");
  pre_cmd->add_option("--manifest", pre.manifest, "Input manifest CSV")->required();
  pre_cmd->add_option("--out-dir", pre.out_dir, "Output directory")->required();
  pre_cmd->add_option("--augment", pre.augment, "Gaussian-noise copies per clip");
  pre_cmd->add_option("--noise-sigma", pre.noise_sigma, "Noise std dev on the 16-bit scale");
  pre_cmd->add_option("--seed", pre.seed, "Random seed");
  pre_cmd->add_flag("--keep-going", pre.keep_going, "Continue past per-file failures");
  pre.dsp.register_flags(pre_cmd);

  ExtractArgs ext;
  auto* ext_cmd = app.add_subcommand("extract", "Extract MFCC feature maps into a cache");
  ext_cmd->add_option("--manifest", ext.manifest, "Input manifest CSV")->required();
  ext_cmd->add_option("--cache-dir", ext.cache_dir, "Feature cache directory (or ACCENTNET_CACHE)");
  ext_cmd->add_flag("--keep-going", ext.keep_going, "Continue past per-file failures");
  ext.dsp.register_flags(ext_cmd);

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Train a model on cached features");
  tr_cmd->add_option("--manifest", tr.manifest, "Input manifest CSV")->required();
  tr_cmd->add_option("--cache-dir", tr.cache_dir, "Feature cache directory (or ACCENTNET_CACHE)");
  tr_cmd->add_option("--out-dir", tr.out_dir, "Run directory root");
  tr_cmd->add_option("--model", tr.model_id, "Model id (densenet121, multi, psa, mpsa, mpsa_tiny)");
  tr_cmd->add_option("--epochs", tr.epochs, "Training epochs");
  tr_cmd->add_option("--batch-size", tr.batch_size, "Batch size");
  tr_cmd->add_option("--lr", tr.learning_rate, "Learning rate");
  tr_cmd->add_option("--seed", tr.seed, "Random seed (init, shuffle, split)");
  tr_cmd->add_option("--weights", tr.weights, "Task weights, e.g. 0.6 0.2 0.2");
  tr_cmd->add_option("--retrain-union", tr.retrain_union,
                     "Also train on a held-out split: none, validation, test");
  tr_cmd->add_option("--early-stop-loss", tr.early_stop_loss,
                     "Stop when train loss falls below this and accent accuracy is 1");
  tr.dsp.register_flags(tr_cmd);

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint on a dataset split");
  ev_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint .tns path")->required();
  ev_cmd->add_option("--manifest", ev.manifest, "Input manifest CSV")->required();
  ev_cmd->add_option("--cache-dir", ev.cache_dir, "Feature cache directory (or ACCENTNET_CACHE)");
  ev_cmd->add_option("--split", ev.split, "Split to evaluate: train, validation, test");
  ev_cmd->add_option("--seed", ev.seed, "Split seed (must match training)");
  ev_cmd->add_option("--beta", ev.beta, "F-beta parameter");
  ev_cmd->add_option("--out-dir", ev.out_dir, "Directory for report and confusion files");
  ev.dsp.register_flags(ev_cmd);

  PredictArgs pr;
  auto* pr_cmd = app.add_subcommand("predict", "Classify a single WAV file");
  pr_cmd->add_option("--checkpoint", pr.checkpoint, "Checkpoint .tns path")->required();
  pr_cmd->add_option("wav", pr.wav_path, "WAV file to classify")->required();
  pr.dsp.register_flags(pr_cmd);

  InspectArgs in;
  auto* in_cmd = app.add_subcommand("inspect", "Print a model's architecture table");
  in_cmd->add_option("model", in.model_id, "Model id")->required();
  in_cmd->add_option("--heads", in.heads, "Override head class counts, e.g. --heads 1000");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
    if (pre_cmd->parsed()) return cmd_preprocess(pre, out);
    if (ext_cmd->parsed()) return cmd_extract(ext, out);
    if (tr_cmd->parsed()) return cmd_train(tr, out);
    if (ev_cmd->parsed()) return cmd_evaluate(ev, out);
    if (pr_cmd->parsed()) return cmd_predict(pr, out);
    if (in_cmd->parsed()) return cmd_inspect(in, out);
    usage_error("no subcommand given");
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::usage:
        return 1;
      case ErrorKind::data:
        return 2;
      case ErrorKind::internal:
        return 3;
    }
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace accentnet::cli
