#include "shapelets/io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "shapelets/version.hpp"

namespace shapelets {

using nlohmann::json;

std::string format_double(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

namespace {

double parse_double(std::string_view token, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc() || result.ptr != last) {
    throw Error(ErrorCode::ParseError,
                "row " + std::to_string(row) + ", column " + std::to_string(col) +
                    ": not a number: '" + std::string(token) + "'");
  }
  return value;
}

long parse_long(std::string_view token, std::size_t row) {
  long value = 0;
  const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
  if (result.ec != std::errc() || result.ptr != token.data() + token.size()) {
    throw Error(ErrorCode::ParseError,
                "row " + std::to_string(row) + ": not an integer label: '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

// Lines split on '\n'; a trailing '\r' is tolerated, a final newline expected.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

json config_to_json(const DiscoveryConfig& cfg) {
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
              {"time_budget_seconds", cfg.time_budget_seconds}};
}

DiscoveryConfig config_from_json(const json& j) {
  DiscoveryConfig cfg;
  cfg.min_len = j.at("min_len").get<Eigen::Index>();
  cfg.max_len = j.at("max_len").get<Eigen::Index>();
  cfg.ig_threshold = j.at("ig_threshold").get<double>();
  cfg.max_shapelets = j.at("max_shapelets").get<std::size_t>();
  cfg.per_class_cap = j.at("per_class_cap").get<std::size_t>();
  cfg.len_stride = j.at("len_stride").get<Eigen::Index>();
  cfg.pos_stride = j.at("pos_stride").get<Eigen::Index>();
  cfg.candidate_sample_fraction = j.at("candidate_sample_fraction").get<double>();
  cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  cfg.exclude_source = j.at("exclude_source").get<bool>();
  cfg.znormalize = j.at("znormalize").get<bool>();
  cfg.length_normalize = j.at("length_normalize").get<bool>();
  cfg.time_budget_seconds = j.at("time_budget_seconds").get<double>();
  return cfg;
}

[[noreturn]] void rethrow_as_parse_error(const std::exception& e) {
  throw Error(ErrorCode::ParseError, e.what());
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      out.close();
      fs::remove(tmp, ec);
      throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot move " + tmp.string() + " into place");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (!in.good() && !in.eof()) {
    throw Error(ErrorCode::IoError, "read failed for " + path.string());
  }
  return buffer.str();
}

// ---- dataset CSV ----

std::string dataset_to_csv(const LabeledDataset& dataset) {
  std::string out;
  const Eigen::Index m = dataset.series(0).length();
  out += "label";
  for (Eigen::Index t = 0; t < m; ++t) {
    out += ",t";
    out += std::to_string(t);
  }
  out += '\n';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset.series(i).length() != m) {
      throw Error(ErrorCode::LengthMismatch,
                  "dataset CSV requires equal-length series; series " + std::to_string(i) +
                      " differs");
    }
    out += std::to_string(dataset.label(i).id());
    const Eigen::ArrayXd& x = dataset.series(i).samples();
    for (Eigen::Index t = 0; t < m; ++t) {
      out += ',';
      out += format_double(x[t]);
    }
    out += '\n';
  }
  return out;
}

LabeledDataset dataset_from_csv(std::string_view text, double sample_rate_hz) {
  const auto lines = split_lines(text);
  if (lines.size() < 2) {
    throw Error(ErrorCode::ParseError, "dataset CSV needs a header and at least one row");
  }
  const auto header = split_line(lines[0]);
  if (header.empty() || header[0] != "label") {
    throw Error(ErrorCode::ParseError, "row 1: header must start with 'label'");
  }
  const std::size_t columns = header.size();
  if (columns < 4) {
    throw Error(ErrorCode::ParseError, "row 1: need at least 3 value columns");
  }
  std::vector<TimeSeries> series;
  std::vector<ClassLabel> labels;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto fields = split_line(lines[row]);
    const std::size_t row_number = row + 1;  // 1-based, counting the header
    if (fields.size() != columns) {
      throw Error(ErrorCode::ParseError,
                  "row " + std::to_string(row_number) + ": expected " + std::to_string(columns) +
                      " fields, found " + std::to_string(fields.size()));
    }
    const long label_id = parse_long(fields[0], row_number);
    if (label_id < 1 || label_id > ClassLabel::kCount) {
      throw Error(ErrorCode::ParseError,
                  "row " + std::to_string(row_number) + ": label must be in 1..7, got " +
                      std::to_string(label_id));
    }
    Eigen::ArrayXd values(static_cast<Eigen::Index>(columns - 1));
    for (std::size_t c = 1; c < columns; ++c) {
      const double v = parse_double(fields[c], row_number, c + 1);
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::ParseError,
                    "row " + std::to_string(row_number) + ": non-finite sample");
      }
      values[static_cast<Eigen::Index>(c - 1)] = v;
    }
    series.emplace_back(std::move(values), sample_rate_hz);
    labels.emplace_back(static_cast<int>(label_id));
  }
  return LabeledDataset(std::move(series), std::move(labels));
}

void write_dataset_csv(const std::filesystem::path& path, const LabeledDataset& dataset) {
  write_file_atomic(path, dataset_to_csv(dataset));
}

LabeledDataset read_dataset_csv(const std::filesystem::path& path, double sample_rate_hz) {
  return dataset_from_csv(read_file(path), sample_rate_hz);
}

// ---- shapelet JSON ----

std::string shapelets_to_json(const std::vector<Shapelet>& shapelets, const DiscoveryConfig& cfg) {
  json doc;
  doc["schema_version"] = kShapeletJsonVersion;
  doc["config"] = config_to_json(cfg);
  json items = json::array();
  for (const Shapelet& s : shapelets) {
    json values = json::array();
    for (Eigen::Index i = 0; i < s.values.size(); ++i) values.push_back(s.values[i]);
    items.push_back(json{{"values", std::move(values)},
                         {"source_series_index", s.source_series_index},
                         {"start_offset", s.start_offset},
                         {"length", s.length()},
                         {"info_gain", s.info_gain},
                         {"split_threshold", s.split_threshold},
                         {"class_hint", s.class_hint.id()}});
  }
  doc["shapelets"] = std::move(items);
  return doc.dump(2) + "\n";
}

std::pair<std::vector<Shapelet>, DiscoveryConfig> shapelets_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("schema_version").get<int>() > kShapeletJsonVersion) {
      throw Error(ErrorCode::ParseError, "shapelet file written by a newer tool version");
    }
    DiscoveryConfig cfg = config_from_json(doc.at("config"));
    std::vector<Shapelet> shapelets;
    for (const json& item : doc.at("shapelets")) {
      const auto& values = item.at("values");
      Eigen::ArrayXd v(static_cast<Eigen::Index>(values.size()));
      for (std::size_t i = 0; i < values.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = values[i].get<double>();
      }
      if (v.size() != item.at("length").get<Eigen::Index>()) {
        throw Error(ErrorCode::ParseError, "shapelet length field disagrees with its values");
      }
      shapelets.push_back(Shapelet{std::move(v),
                                   item.at("source_series_index").get<std::size_t>(),
                                   item.at("start_offset").get<Eigen::Index>(),
                                   item.at("info_gain").get<double>(),
                                   item.at("split_threshold").get<double>(),
                                   ClassLabel(item.at("class_hint").get<int>())});
    }
    return {std::move(shapelets), cfg};
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    rethrow_as_parse_error(e);
  }
}

void write_shapelets_json(const std::filesystem::path& path,
                          const std::vector<Shapelet>& shapelets, const DiscoveryConfig& cfg) {
  write_file_atomic(path, shapelets_to_json(shapelets, cfg));
}

std::pair<std::vector<Shapelet>, DiscoveryConfig> read_shapelets_json(
    const std::filesystem::path& path) {
  return shapelets_from_json(read_file(path));
}

// ---- transform CSV ----

std::string transform_to_csv(const TransformMatrix& matrix) {
  std::string out;
  for (const std::string& id : matrix.feature_ids) {
    out += id;
    out += ',';
  }
  out += "label\n";
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      out += format_double(matrix.values(i, j));
      out += ',';
    }
    out += std::to_string(matrix.labels[static_cast<std::size_t>(i)].id());
    out += '\n';
  }
  return out;
}

TransformMatrix transform_from_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.size() < 2) {
    throw Error(ErrorCode::ParseError, "transform CSV needs a header and at least one row");
  }
  const auto header = split_line(lines[0]);
  if (header.size() < 2 || header.back() != "label") {
    throw Error(ErrorCode::ParseError, "row 1: transform header must end with 'label'");
  }
  TransformMatrix out;
  const std::size_t r = header.size() - 1;
  for (std::size_t j = 0; j < r; ++j) out.feature_ids.emplace_back(header[j]);
  const std::size_t n = lines.size() - 1;
  out.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(r));
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto fields = split_line(lines[row]);
    const std::size_t row_number = row + 1;
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::ParseError,
                  "row " + std::to_string(row_number) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < r; ++j) {
      out.values(static_cast<Eigen::Index>(row - 1), static_cast<Eigen::Index>(j)) =
          parse_double(fields[j], row_number, j + 1);
    }
    const long label_id = parse_long(fields[r], row_number);
    if (label_id < 1 || label_id > ClassLabel::kCount) {
      throw Error(ErrorCode::ParseError,
                  "row " + std::to_string(row_number) + ": label must be in 1..7");
    }
    out.labels.emplace_back(static_cast<int>(label_id));
  }
  return out;
}

void write_transform_csv(const std::filesystem::path& path, const TransformMatrix& matrix) {
  write_file_atomic(path, transform_to_csv(matrix));
}

TransformMatrix read_transform_csv(const std::filesystem::path& path) {
  return transform_from_csv(read_file(path));
}

// ---- model JSON ----

std::string model_to_json(const ForestModel& model) {
  json doc;
  doc["schema_version"] = kModelJsonVersion;
  doc["config"] = json{{"n_trees", model.config.n_trees},
                       {"max_features_per_split", model.config.max_features_per_split},
                       {"min_samples_leaf", model.config.min_samples_leaf},
                       {"max_depth", model.config.max_depth},
                       {"rng_seed", model.config.rng_seed}};
  doc["feature_count"] = model.feature_count;
  json classes = json::array();
  for (const ClassLabel& c : model.classes) classes.push_back(c.id());
  doc["classes"] = std::move(classes);
  json trees = json::array();
  for (const DecisionTree& tree : model.trees) {
    json nodes = json::array();
    for (const TreeNode& node : tree.nodes) {
      if (node.is_leaf()) {
        json probs = json::array();
        for (Eigen::Index c = 0; c < node.probabilities.size(); ++c) {
          probs.push_back(node.probabilities[c]);
        }
        nodes.push_back(json{{"probs", std::move(probs)}});
      } else {
        nodes.push_back(json{{"feature", node.feature},
                             {"threshold", node.threshold},
                             {"left", node.left},
                             {"right", node.right}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  doc["trees"] = std::move(trees);
  return doc.dump() + "\n";
}

ForestModel model_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("schema_version").get<int>() > kModelJsonVersion) {
      throw Error(ErrorCode::ParseError, "model file written by a newer tool version");
    }
    ForestModel model;
    const json& cfg = doc.at("config");
    model.config.n_trees = cfg.at("n_trees").get<int>();
    model.config.max_features_per_split = cfg.at("max_features_per_split").get<int>();
    model.config.min_samples_leaf = cfg.at("min_samples_leaf").get<int>();
    model.config.max_depth = cfg.at("max_depth").get<int>();
    model.config.rng_seed = cfg.at("rng_seed").get<std::uint64_t>();
    model.feature_count = doc.at("feature_count").get<std::size_t>();
    for (const json& c : doc.at("classes")) model.classes.emplace_back(c.get<int>());
    for (const json& tree_json : doc.at("trees")) {
      DecisionTree tree;
      for (const json& node_json : tree_json) {
        TreeNode node;
        if (node_json.contains("probs")) {
          const auto& probs = node_json.at("probs");
          node.probabilities.resize(static_cast<Eigen::Index>(probs.size()));
          for (std::size_t c = 0; c < probs.size(); ++c) {
            node.probabilities[static_cast<Eigen::Index>(c)] = probs[c].get<double>();
          }
        } else {
          node.feature = node_json.at("feature").get<int>();
          node.threshold = node_json.at("threshold").get<double>();
          node.left = node_json.at("left").get<int>();
          node.right = node_json.at("right").get<int>();
          if (node.feature < 0 ||
              static_cast<std::size_t>(node.feature) >= model.feature_count) {
            throw Error(ErrorCode::ParseError, "model node references a feature out of range");
          }
        }
        tree.nodes.push_back(std::move(node));
      }
      if (tree.nodes.empty()) {
        throw Error(ErrorCode::ParseError, "model contains an empty tree");
      }
      model.trees.push_back(std::move(tree));
    }
    return model;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    rethrow_as_parse_error(e);
  }
}

void write_model_json(const std::filesystem::path& path, const ForestModel& model) {
  write_file_atomic(path, model_to_json(model));
}

ForestModel read_model_json(const std::filesystem::path& path) {
  return model_from_json(read_file(path));
}

// ---- report ----

std::string report_to_json(const Report& report, const ConfusionMatrix& cm) {
  json doc;
  doc["accuracy"] = report.accuracy;
  json per_class = json::object();
  for (const ClassMetrics& m : report.per_class) {
    per_class[std::string(m.label.name())] =
        json{{"precision", m.precision},
             {"recall", m.recall},
             {"f1", m.f1},
             {"precision_undefined", m.precision_undefined},
             {"recall_undefined", m.recall_undefined},
             {"f1_undefined", m.f1_undefined},
             {"support", m.support},
             {"one_vs_rest_accuracy", m.one_vs_rest_accuracy}};
  }
  doc["per_class"] = std::move(per_class);
  json matrix = json::array();
  for (Eigen::Index i = 0; i < cm.counts.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < cm.counts.cols(); ++j) row.push_back(cm.counts(i, j));
    matrix.push_back(std::move(row));
  }
  json class_ids = json::array();
  for (const ClassLabel& c : cm.classes) class_ids.push_back(c.id());
  doc["confusion"] = json{{"classes", std::move(class_ids)}, {"counts", std::move(matrix)}};
  return doc.dump(2) + "\n";
}

std::string report_to_text(const Report& report) {
  char line[128];
  std::string out;
  std::snprintf(line, sizeof(line), "%-10s %10s %10s %10s %10s\n", "class", "precision",
                "recall", "f1", "support");
  out += line;
  for (const ClassMetrics& m : report.per_class) {
    std::snprintf(line, sizeof(line), "%-10s %10.4f %10.4f %10.4f %10zu\n",
                  std::string(m.label.name()).c_str(), m.precision, m.recall, m.f1, m.support);
    out += line;
  }
  std::snprintf(line, sizeof(line), "\naccuracy   %10.4f\n", report.accuracy);
  out += line;
  return out;
}

std::string confusion_to_csv(const ConfusionMatrix& cm) {
  std::string out = "actual\\predicted";
  for (const ClassLabel& c : cm.classes) {
    out += ',';
    out += std::string(c.name());
  }
  out += '\n';
  for (Eigen::Index i = 0; i < cm.counts.rows(); ++i) {
    out += std::string(cm.classes[static_cast<std::size_t>(i)].name());
    for (Eigen::Index j = 0; j < cm.counts.cols(); ++j) {
      out += ',';
      out += std::to_string(cm.counts(i, j));
    }
    out += '\n';
  }
  return out;
}

// ---- manifest ----

std::string manifest_to_json(const std::string& command, const nlohmann::json& config,
                             const std::vector<std::filesystem::path>& inputs,
                             const std::vector<std::filesystem::path>& outputs,
                             double duration_seconds) {
  json doc;
  doc["schema_version"] = kManifestJsonVersion;
  doc["tool_version"] = kVersion;
  doc["command"] = command;
  doc["config"] = config;
  json in = json::array();
  for (const auto& path : inputs) {
    in.push_back(json{{"path", path.string()}, {"fnv1a64", fnv1a_hex(read_file(path))}});
  }
  doc["inputs"] = std::move(in);
  json out = json::array();
  for (const auto& path : outputs) out.push_back(path.string());
  doc["outputs"] = std::move(out);
  doc["duration_seconds"] = duration_seconds;
  return doc.dump(2) + "\n";
}

void write_manifest(const std::filesystem::path& output_path, const std::string& command,
                    const nlohmann::json& config,
                    const std::vector<std::filesystem::path>& inputs,
                    const std::vector<std::filesystem::path>& outputs,
                    double duration_seconds) {
  const std::filesystem::path path = output_path.string() + ".manifest.json";
  write_file_atomic(path, manifest_to_json(command, config, inputs, outputs, duration_seconds));
}

}  // namespace shapelets
