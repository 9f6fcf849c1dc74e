#include "core/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/metric.hpp"

namespace lindml {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

double parse_double(std::string_view field, const std::string& path) {
  double v = 0.0;
  const auto* begin = field.data();
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw IoError("malformed numeric field '" + std::string(field) + "' in " + path);
  }
  return v;
}

int parse_label(std::string_view field, const std::string& path) {
  const double v = parse_double(field, path);
  if (v != 1.0 && v != -1.0) {
    throw IoError("label fields must be -1 or 1 in " + path);
  }
  return static_cast<int>(v);
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

json matrix_to_json(const Matrix& m) {
  json arr = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  }
  return arr;
}

Matrix matrix_from_json(const json& arr, int rows, int cols,
                        const std::string& path) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != rows * cols) {
    throw IoError("matrix field has wrong length in " + path);
  }
  Matrix m(rows, cols);
  int idx = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = arr[idx++].get<double>();
  }
  return m;
}

json load_json(const std::string& path) {
  auto in = open_in(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw IoError("failed to parse " + path + ": " + e.what());
  }
  return doc;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void save_dataset(const Dataset& data, const std::string& path) {
  auto out = open_out(path);
  std::ostringstream header;
  for (int j = 0; j < data.dim; ++j) header << 'z' << j << ',';
  header << "label";
  if (data.clean_labels) header << ",clean_label";
  out << header.str() << '\n';
  for (int i = 0; i < data.num_pairs(); ++i) {
    for (int j = 0; j < data.dim; ++j) {
      out << format_double(data.z(i, j)) << ',';
    }
    out << data.labels[i];
    if (data.clean_labels) out << ',' << (*data.clean_labels)[i];
    out << '\n';
  }
  if (!out) throw IoError("failed while writing " + path);
}

Dataset load_dataset(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty dataset file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_row(line);
  int dim = 0;
  while (dim < static_cast<int>(header.size()) &&
         header[dim] == "z" + std::to_string(dim)) {
    ++dim;
  }
  if (dim == 0 || dim >= static_cast<int>(header.size()) ||
      header[dim] != "label") {
    throw IoError("dataset header must be z0..z{d-1},label[,clean_label]: " + path);
  }
  const bool has_clean = static_cast<int>(header.size()) == dim + 2 &&
                         header[dim + 1] == "clean_label";
  if (!has_clean && static_cast<int>(header.size()) != dim + 1) {
    throw IoError("unexpected trailing columns in " + path);
  }

  std::vector<double> z_values;
  std::vector<int> labels;
  std::vector<int> clean;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_row(line);
    if (static_cast<int>(fields.size()) != dim + 1 + (has_clean ? 1 : 0)) {
      throw IoError("row with wrong field count in " + path);
    }
    for (int j = 0; j < dim; ++j) {
      z_values.push_back(parse_double(fields[j], path));
    }
    labels.push_back(parse_label(fields[dim], path));
    if (has_clean) clean.push_back(parse_label(fields[dim + 1], path));
  }

  const int n = static_cast<int>(labels.size());
  Matrix z(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) z(i, j) = z_values[i * dim + j];
  }
  IntVector lab(n);
  for (int i = 0; i < n; ++i) lab[i] = labels[i];
  std::optional<IntVector> clean_vec;
  if (has_clean) {
    IntVector cv(n);
    for (int i = 0; i < n; ++i) cv[i] = clean[i];
    clean_vec = cv;
  }
  Dataset data;
  data.dim = dim;
  data.z = std::move(z);
  data.labels = std::move(lab);
  data.clean_labels = std::move(clean_vec);
  data.support_bound =
      n > 0 ? std::optional<double>(data.z.rowwise().squaredNorm().maxCoeff())
            : std::nullopt;
  validate(data);
  return data;
}

void save_model(const MetricModel& model, const ModelMetadata& meta,
                const std::string& path,
                const std::optional<FactorModel>& factor) {
  json doc;
  doc["dim"] = model.dim();
  doc["matrix"] = matrix_to_json(model.m);
  doc["tau"] = model.tau;
  doc["metadata"] = {{"seed", meta.seed},
                     {"noise_kind", meta.noise_kind},
                     {"created", meta.created}};
  if (factor) {
    doc["factor"] = matrix_to_json(factor->factor);
    doc["rank_bound"] = factor->rank_bound();
    doc["factor_tau"] = factor->tau;
  }
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed while writing " + path);
}

LoadedModel load_model(const std::string& path) {
  const json doc = load_json(path);
  LoadedModel out;
  try {
    const int dim = doc.at("dim").get<int>();
    out.model.m = matrix_from_json(doc.at("matrix"), dim, dim, path);
    out.model.tau = doc.at("tau").get<double>();
    const json& meta = doc.at("metadata");
    out.metadata.seed = meta.at("seed").get<std::uint64_t>();
    out.metadata.noise_kind = meta.at("noise_kind").get<std::string>();
    out.metadata.created = meta.value("created", "");
    if (doc.contains("factor")) {
      FactorModel f;
      const int k = doc.at("rank_bound").get<int>();
      f.factor = matrix_from_json(doc.at("factor"), dim, k, path);
      f.tau = doc.at("factor_tau").get<double>();
      out.factor = std::move(f);
    }
  } catch (const json::exception& e) {
    throw IoError("model file " + path + " is malformed: " + e.what());
  }
  validate(out.model);
  return out;
}

void save_sidecar(const SyntheticSpec& spec, const GenerationResult& gen,
                  int train_count, int test_count, const std::string& path) {
  json doc;
  doc["spec"] = {
      {"dim", spec.dim},
      {"rank", spec.rank},
      {"m_star_eigs", spec.m_star_eigs},
      {"sigma_eigs", spec.sigma_eigs},
      {"tau_star", spec.tau_star},
      {"n_pairs", spec.n_pairs},
      {"regime", spec.regime == NoiseRegime::kNormNoise ? "norm" : "flip"},
      {"noise_kind", noise_kind_name(spec.noise_kind)},
      {"target_mislabel", spec.target_mislabel},
      {"flip_p", spec.flip_p},
      {"seed", spec.seed},
  };
  doc["realized_mislabel"] = gen.realized_mislabel;
  doc["noise_scale"] = gen.noise_scale;
  doc["far_fraction"] = gen.far_fraction;
  doc["support_bound"] = gen.data.support_bound ? *gen.data.support_bound : 0.0;
  doc["split"] = {{"train", train_count}, {"test", test_count}};
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed while writing " + path);
}

namespace {

json report_to_json(const EvalReport& report) {
  json doc;
  doc["train_acc_noisy"] = report.train_acc_noisy;
  doc["test_acc_noisy"] = report.test_acc_noisy;
  doc["has_clean"] = report.has_clean;
  if (report.has_clean) {
    doc["train_acc_clean"] = report.train_acc_clean;
    doc["test_acc_clean"] = report.test_acc_clean;
    doc["realized_mislabel"] = report.realized_mislabel;
  }
  doc["has_star"] = report.has_star;
  if (report.has_star) {
    doc["rel_spectral"] = report.rel_spectral;
    doc["rel_frobenius"] = report.rel_frobenius;
    doc["eig_star"] = std::vector<double>(report.eig_star.data(),
                                          report.eig_star.data() +
                                              report.eig_star.size());
  }
  doc["eig_hat"] = std::vector<double>(report.eig_hat.data(),
                                       report.eig_hat.data() +
                                           report.eig_hat.size());
  doc["loss_final"] = report.loss_final;
  doc["iterations_run"] = report.iterations_run;
  doc["wall_time"] = report.wall_time;
  return doc;
}

}  // namespace

void save_eval_report(const EvalReport& report, const std::string& path) {
  auto out = open_out(path);
  out << report_to_json(report).dump(2) << '\n';
  if (!out) throw IoError("failed while writing " + path);
}

std::string eval_report_csv_header() {
  return "train_acc_noisy,train_acc_clean,test_acc_noisy,test_acc_clean,"
         "rel_spectral,rel_frobenius,loss_final,realized_mislabel,"
         "iterations_run,wall_time";
}

std::string eval_report_csv_row(const EvalReport& report) {
  std::ostringstream row;
  row << format_double(report.train_acc_noisy) << ','
      << (report.has_clean ? format_double(report.train_acc_clean) : "") << ','
      << format_double(report.test_acc_noisy) << ','
      << (report.has_clean ? format_double(report.test_acc_clean) : "") << ','
      << (report.has_star ? format_double(report.rel_spectral) : "") << ','
      << (report.has_star ? format_double(report.rel_frobenius) : "") << ','
      << format_double(report.loss_final) << ','
      << (report.has_clean ? format_double(report.realized_mislabel) : "")
      << ',' << report.iterations_run << ','
      << format_double(report.wall_time);
  return row.str();
}

void save_loss_history(const std::vector<std::pair<int, double>>& history,
                       const std::string& path) {
  auto out = open_out(path);
  out << "iteration,risk\n";
  for (const auto& [iteration, value] : history) {
    out << iteration << ',' << format_double(value) << '\n';
  }
  if (!out) throw IoError("failed while writing " + path);
}

}  // namespace lindml
