// Command-line front end for the shapelet anomaly pipeline:
//   generate -> preprocess -> discover -> transform -> train -> evaluate
// Every command writes its primary output plus a <out>.manifest.json with
// the resolved configuration and input hashes. Exit codes: 0 ok, 2 bad
// arguments, 3 parse error, 4 domain error, 5 I/O error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "shapelets/discovery.hpp"
#include "shapelets/forest.hpp"
#include "shapelets/io.hpp"
#include "shapelets/metrics.hpp"
#include "shapelets/preprocess.hpp"
#include "shapelets/rng.hpp"
#include "shapelets/synthgen.hpp"
#include "shapelets/transform.hpp"
#include "shapelets/types.hpp"
#include "shapelets/version.hpp"

namespace {

using nlohmann::json;
using namespace shapelets;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgs:
      return 2;
    case ErrorCode::ParseError:
      return 3;
    case ErrorCode::IoError:
      return 5;
    default:
      return 4;  // domain errors
  }
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct GenerateArgs {
  std::string preset = "balanced";
  std::size_t per_class = 100;
  std::size_t total = 1000;
  Eigen::Index length = 3600;
  std::uint64_t seed = 0;
  double noise = 1.0;
  bool raw = false;
  std::string out;
};

void run_generate(const GenerateArgs& a) {
  Stopwatch watch;
  GeneratorSpec spec;
  if (a.preset == "balanced") {
    if (a.per_class == 0) {
      throw Error(ErrorCode::InvalidArgs, "--per-class must be positive");
    }
    spec = balanced_spec(a.per_class, a.length, a.seed);
  } else if (a.preset == "realistic") {
    spec = realistic_spec(a.total, a.length, a.seed);
  } else {
    throw Error(ErrorCode::InvalidArgs, "--preset must be balanced or realistic");
  }
  spec.noise_level = a.noise;

  LabeledDataset dataset = [&] {
    if (!a.raw) return generate_dataset(spec);
    std::vector<TimeSeries> series;
    std::vector<ClassLabel> labels;
    std::uint64_t ordinal = 0;
    for (const auto& [id, count] : spec.per_class_counts) {
      for (std::size_t i = 0; i < count; ++i, ++ordinal) {
        series.push_back(generate_raw_vibration(ClassLabel(id), spec.series_length,
                                                derive_seed(spec.rng_seed, ordinal), spec));
        labels.emplace_back(id);
      }
    }
    return LabeledDataset(std::move(series), std::move(labels));
  }();

  write_dataset_csv(a.out, dataset);
  json cfg{{"preset", a.preset}, {"per_class", a.per_class}, {"total", a.total},
           {"length", a.length}, {"seed", a.seed},           {"noise", a.noise},
           {"raw", a.raw}};
  write_manifest(a.out, "generate", cfg, {}, {a.out}, watch.seconds());
  std::cout << "wrote " << dataset.size() << " series to " << a.out << "\n";
}

struct PreprocessArgs {
  std::string in;
  std::string out;
  double rate = 1.0;
  Eigen::Index envelope_window = 0;  // 0 = off
  Eigen::Index downsample_factor = 0;
  bool hampel = false;
  Eigen::Index hampel_window = 11;
  double hampel_k = 3.0;
  bool detrend_flag = false;
};

void run_preprocess(const PreprocessArgs& a) {
  Stopwatch watch;
  LabeledDataset input = read_dataset_csv(a.in, a.rate);
  std::vector<TimeSeries> series;
  series.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    TimeSeries s = input.series(i);
    if (a.envelope_window > 0) s = peak_envelope(s, a.envelope_window);
    if (a.downsample_factor > 0) s = downsample(s, a.downsample_factor);
    if (a.hampel) s = remove_outliers(s, a.hampel_window, a.hampel_k);
    if (a.detrend_flag) s = detrend(s);
    series.push_back(std::move(s));
  }
  LabeledDataset output(std::move(series), input.labels());
  write_dataset_csv(a.out, output);
  json cfg{{"rate", a.rate},
           {"envelope_window", a.envelope_window},
           {"downsample", a.downsample_factor},
           {"remove_outliers", a.hampel},
           {"hampel_window", a.hampel_window},
           {"hampel_k", a.hampel_k},
           {"detrend", a.detrend_flag}};
  write_manifest(a.out, "preprocess", cfg, {a.in}, {a.out}, watch.seconds());
  std::cout << "wrote " << output.size() << " series to " << a.out << "\n";
}

struct DiscoverArgs {
  std::string in;
  std::string out;
  double rate = 1.0;
  DiscoveryConfig cfg;
};

json discovery_config_json(const DiscoveryConfig& cfg) {
  return json{{"min_len", cfg.min_len},
              {"max_len", cfg.max_len},
              {"ig_threshold", cfg.ig_threshold},
              {"max_shapelets", cfg.max_shapelets},
              {"per_class_cap", cfg.per_class_cap},
              {"len_stride", cfg.len_stride},
              {"pos_stride", cfg.pos_stride},
              {"candidate_sample_fraction", cfg.candidate_sample_fraction},
              {"rng_seed", cfg.rng_seed},
              {"exclude_source", cfg.exclude_source},
              {"znormalize", cfg.znormalize},
              {"length_normalize", cfg.length_normalize},
              {"time_budget_seconds", cfg.time_budget_seconds},
              {"threads", cfg.threads}};
}

void run_discover(const DiscoverArgs& a) {
  Stopwatch watch;
  LabeledDataset dataset = read_dataset_csv(a.in, a.rate);
  DiscoveryStats stats;
  std::vector<Shapelet> shapelets = discover_shapelets(dataset, a.cfg, &stats);
  write_shapelets_json(a.out, shapelets, a.cfg);
  write_manifest(a.out, "discover", discovery_config_json(a.cfg), {a.in}, {a.out},
                 watch.seconds());
  std::cout << "scored " << stats.candidates_scored << " candidates over "
            << stats.series_scanned << " series; " << stats.threshold_survivors
            << " cleared the gain threshold, " << stats.after_pruning
            << " after overlap pruning; retained " << shapelets.size() << "\n";
  std::cout << "per-class retained:";
  for (int id = 1; id <= ClassLabel::kCount; ++id) {
    std::cout << ' ' << ClassLabel(id).name() << '='
              << stats.per_class_retained[static_cast<std::size_t>(id - 1)];
  }
  std::cout << "\n";
}

struct TransformArgs {
  std::string data;
  std::string shapelet_file;
  std::string out;
  double rate = 1.0;
  int threads = 1;
};

void run_transform(const TransformArgs& a) {
  Stopwatch watch;
  LabeledDataset dataset = read_dataset_csv(a.data, a.rate);
  auto [shapelets, cfg] = read_shapelets_json(a.shapelet_file);
  if (shapelets.empty()) {
    throw Error(ErrorCode::EmptyShapeletSet, "shapelet file holds no shapelets");
  }
  // Distance semantics travel with the shapelet file.
  TransformMatrix matrix = shapelet_transform(dataset, shapelets, cfg.distance_options(), a.threads);
  write_transform_csv(a.out, matrix);
  json cfg_json{{"rate", a.rate}, {"threads", a.threads},
                {"distance", {{"znormalize", cfg.znormalize},
                              {"length_normalize", cfg.length_normalize}}}};
  write_manifest(a.out, "transform", cfg_json, {a.data, a.shapelet_file}, {a.out},
                 watch.seconds());
  std::cout << "wrote " << matrix.rows() << " x " << matrix.cols() << " matrix to " << a.out
            << "\n";
}

struct TrainArgs {
  std::string in;
  std::string out;
  ForestConfig cfg;
};

void run_train(const TrainArgs& a) {
  Stopwatch watch;
  TransformMatrix matrix = read_transform_csv(a.in);
  ForestModel model = train_forest(matrix, a.cfg);
  write_model_json(a.out, model);
  json cfg{{"trees", a.cfg.n_trees},
           {"max_features", a.cfg.max_features_per_split},
           {"min_samples_leaf", a.cfg.min_samples_leaf},
           {"max_depth", a.cfg.max_depth},
           {"seed", a.cfg.rng_seed},
           {"threads", a.cfg.threads}};
  write_manifest(a.out, "train", cfg, {a.in}, {a.out}, watch.seconds());
  std::cout << "trained " << model.trees.size() << " trees on " << matrix.rows()
            << " rows, wrote " << a.out << "\n";
}

struct EvaluateArgs {
  std::string model_file;
  std::string data;
  std::string out;
  std::string confusion_out;
};

void run_evaluate(const EvaluateArgs& a) {
  Stopwatch watch;
  ForestModel model = read_model_json(a.model_file);
  TransformMatrix matrix = read_transform_csv(a.data);
  if (static_cast<std::size_t>(matrix.cols()) != model.feature_count) {
    throw Error(ErrorCode::FeatureLengthMismatch,
                "test matrix has " + std::to_string(matrix.cols()) + " features, model expects " +
                    std::to_string(model.feature_count) + " (shapelet sets differ?)");
  }
  std::vector<ClassLabel> predicted = predict_labels(model, matrix.values);
  ConfusionMatrix cm = confusion_matrix(matrix.labels, predicted);
  Report report = classification_report(cm);

  const std::string confusion_path =
      a.confusion_out.empty() ? a.out + ".confusion.csv" : a.confusion_out;
  write_file_atomic(a.out, report_to_json(report, cm));
  write_file_atomic(confusion_path, confusion_to_csv(cm));
  json cfg{{"model", a.model_file}, {"data", a.data}, {"confusion", confusion_path}};
  write_manifest(a.out, "evaluate", cfg, {a.model_file, a.data}, {a.out, confusion_path},
                 watch.seconds());
  std::cout << report_to_text(report);
}

void emit_error(std::string_view code, const std::string& message) {
  json err{{"error", std::string(code)}, {"message", message}};
  std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shapelet-transform time series anomaly classification"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "emit a labeled synthetic dataset CSV");
  cmd_gen->add_option("--preset", gen.preset, "balanced | realistic")->capture_default_str();
  cmd_gen->add_option("--per-class", gen.per_class, "series per class (balanced preset)")
      ->capture_default_str();
  cmd_gen->add_option("--total", gen.total, "total series (realistic preset)")
      ->capture_default_str();
  cmd_gen->add_option("--length", gen.length, "samples per series")->capture_default_str();
  cmd_gen->add_option("--seed", gen.seed, "master RNG seed")->capture_default_str();
  cmd_gen->add_option("--noise", gen.noise, "noise floor scale")->capture_default_str();
  cmd_gen->add_flag("--raw", gen.raw, "emit 20 Hz raw vibration instead of envelopes");
  cmd_gen->add_option("--out", gen.out, "output dataset CSV")->required();
  cmd_gen->callback([&] { run_generate(gen); });

  PreprocessArgs pre;
  auto* cmd_pre = app.add_subcommand("preprocess", "envelope, downsample and filter a dataset");
  cmd_pre->add_option("--in", pre.in, "input dataset CSV")->required();
  cmd_pre->add_option("--out", pre.out, "output dataset CSV")->required();
  cmd_pre->add_option("--rate", pre.rate, "input sample rate in Hz")->capture_default_str();
  cmd_pre->add_option("--envelope-window", pre.envelope_window,
                      "peak envelope window in samples (0 = off)");
  cmd_pre->add_option("--downsample", pre.downsample_factor, "block-max factor (0 = off)");
  cmd_pre->add_flag("--remove-outliers", pre.hampel, "apply the Hampel filter");
  cmd_pre->add_option("--hampel-window", pre.hampel_window, "Hampel window (odd)")
      ->capture_default_str();
  cmd_pre->add_option("--hampel-k", pre.hampel_k, "Hampel threshold factor")
      ->capture_default_str();
  cmd_pre->add_flag("--detrend", pre.detrend_flag, "subtract the least-squares line");
  cmd_pre->callback([&] { run_preprocess(pre); });

  DiscoverArgs dis;
  auto* cmd_dis = app.add_subcommand("discover", "search a dataset for shapelets");
  cmd_dis->add_option("--in", dis.in, "input dataset CSV")->required();
  cmd_dis->add_option("--out", dis.out, "output shapelet JSON")->required();
  cmd_dis->add_option("--rate", dis.rate, "input sample rate in Hz")->capture_default_str();
  cmd_dis->add_option("--min-len", dis.cfg.min_len, "minimum shapelet length")
      ->capture_default_str();
  cmd_dis->add_option("--max-len", dis.cfg.max_len, "maximum length (0 = series length)")
      ->capture_default_str();
  cmd_dis->add_option("--ig-threshold", dis.cfg.ig_threshold, "minimum information gain")
      ->capture_default_str();
  cmd_dis->add_option("--max-shapelets", dis.cfg.max_shapelets,
                      "cap r on retained shapelets (0 = 10x dataset size)");
  cmd_dis->add_option("--per-class-cap", dis.cfg.per_class_cap,
                      "cap per source class (0 = r / numC)");
  cmd_dis->add_option("--len-stride", dis.cfg.len_stride, "stride over lengths")
      ->capture_default_str();
  cmd_dis->add_option("--pos-stride", dis.cfg.pos_stride, "stride over start offsets")
      ->capture_default_str();
  cmd_dis->add_option("--sample-fraction", dis.cfg.candidate_sample_fraction,
                      "seeded candidate subsample in (0,1]")
      ->capture_default_str();
  cmd_dis->add_option("--seed", dis.cfg.rng_seed, "master RNG seed")->capture_default_str();
  cmd_dis->add_option("--time-budget", dis.cfg.time_budget_seconds,
                      "wall-clock budget in seconds (0 = none); cuts at a series boundary");
  bool include_self = false;
  cmd_dis->add_flag("--include-self", include_self,
                    "score candidates against their own source series too");
  bool no_normalize = false;
  cmd_dis->add_flag("--no-normalize", no_normalize, "compare raw values instead of z-normalized");
  cmd_dis->add_flag("--length-normalize", dis.cfg.length_normalize,
                    "divide distances by subsequence length");
  cmd_dis->add_option("--threads", dis.cfg.threads, "worker threads")->capture_default_str();
  cmd_dis->callback([&] {
    dis.cfg.exclude_source = !include_self;
    dis.cfg.znormalize = !no_normalize;
    run_discover(dis);
  });

  TransformArgs tra;
  auto* cmd_tra = app.add_subcommand("transform", "project a dataset into shapelet-distance space");
  cmd_tra->add_option("--data", tra.data, "dataset CSV")->required();
  cmd_tra->add_option("--shapelets", tra.shapelet_file, "shapelet JSON")->required();
  cmd_tra->add_option("--out", tra.out, "output transform CSV")->required();
  cmd_tra->add_option("--rate", tra.rate, "dataset sample rate in Hz")->capture_default_str();
  cmd_tra->add_option("--threads", tra.threads, "worker threads")->capture_default_str();
  cmd_tra->callback([&] { run_transform(tra); });

  TrainArgs trn;
  auto* cmd_trn = app.add_subcommand("train", "train a random forest on a transform CSV");
  cmd_trn->add_option("--in", trn.in, "transform CSV")->required();
  cmd_trn->add_option("--out", trn.out, "output model JSON")->required();
  cmd_trn->add_option("--trees", trn.cfg.n_trees, "number of trees")->capture_default_str();
  cmd_trn->add_option("--max-features", trn.cfg.max_features_per_split,
                      "features drawn per split (0 = floor(sqrt(r)))");
  cmd_trn->add_option("--min-samples-leaf", trn.cfg.min_samples_leaf, "minimum rows per leaf")
      ->capture_default_str();
  cmd_trn->add_option("--max-depth", trn.cfg.max_depth, "depth cap (-1 = unlimited)")
      ->capture_default_str();
  cmd_trn->add_option("--seed", trn.cfg.rng_seed, "master RNG seed")->capture_default_str();
  cmd_trn->add_option("--threads", trn.cfg.threads, "worker threads")->capture_default_str();
  cmd_trn->callback([&] { run_train(trn); });

  EvaluateArgs eva;
  auto* cmd_eva = app.add_subcommand("evaluate", "score a model on a transform CSV");
  cmd_eva->add_option("--model", eva.model_file, "model JSON")->required();
  cmd_eva->add_option("--data", eva.data, "transform CSV with labels")->required();
  cmd_eva->add_option("--out", eva.out, "output report JSON")->required();
  cmd_eva->add_option("--confusion", eva.confusion_out,
                      "confusion matrix CSV (default <out>.confusion.csv)");
  cmd_eva->callback([&] { run_evaluate(eva); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help / --version
    emit_error("InvalidArgs", e.what());
    return 2;
  } catch (const Error& e) {
    emit_error(e.code_name(), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    emit_error("InternalError", e.what());
    return 1;
  }
  return 0;
}
