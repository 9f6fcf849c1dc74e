// Experiment CLI for the lindml library. Subcommands: gen, fit, eval,
// truncate, complexity, experiment. Every command is a pure function of its
// flags, input files, and seed; rerunning reproduces identical outputs.

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli_util.hpp"
#include "lindml.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cli;

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(kExitIo, "cannot open for writing: " + path);
  return out;
}

// ---------------------------------------------------------------- datasets

DatasetHandle load_canonical(const std::string& path) {
  DatasetHandle data;
  check(lindml_dataset_load(path.c_str(), data.out()), "loading " + path);
  return data;
}

// Generic delimited ingestion: any column set, a declared label column, an
// optional declared clean-label column; every other column is a feature
// coordinate (a point z directly, i.e. the y = 0 convention).
DatasetHandle load_with_label_column(const std::string& path,
                                     const std::string& label_column,
                                     const std::string& clean_column) {
  std::ifstream in(path);
  if (!in) throw CliError(kExitIo, "cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw CliError(kExitIo, "empty dataset file: " + path);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto split = [](const std::string& text) {
    std::vector<std::string> fields;
    std::stringstream stream(text);
    std::string field;
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!text.empty() && text.back() == ',') fields.push_back("");
    return fields;
  };

  const std::vector<std::string> header = split(line);
  int label_ix = -1, clean_ix = -1;
  std::vector<int> feature_ix;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    if (header[i] == label_column) {
      label_ix = i;
    } else if (!clean_column.empty() && header[i] == clean_column) {
      clean_ix = i;
    } else {
      feature_ix.push_back(i);
    }
  }
  if (label_ix < 0) {
    throw CliError(kExitConfig,
                   "label column '" + label_column + "' not found in " + path);
  }
  if (!clean_column.empty() && clean_ix < 0) {
    throw CliError(kExitConfig, "clean label column '" + clean_column +
                                    "' not found in " + path);
  }
  const int dim = static_cast<int>(feature_ix.size());
  if (dim == 0) {
    throw CliError(kExitConfig, "no feature columns left in " + path);
  }

  auto parse_label = [&](const std::string& field) {
    const double v = std::stod(field);
    if (v == 1.0 || v == -1.0) return static_cast<int>(v);
    if (v == 0.0) return -1;  // 0/1 labelings map to Close/Far
    throw CliError(kExitIo, "label value '" + field + "' in " + path +
                                " is not in {-1, 0, 1}");
  };

  std::vector<double> z;
  std::vector<int> labels, clean;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != header.size()) {
      throw CliError(kExitIo, "row with wrong field count in " + path);
    }
    try {
      for (int ix : feature_ix) z.push_back(std::stod(fields[ix]));
      labels.push_back(parse_label(fields[label_ix]));
      if (clean_ix >= 0) clean.push_back(parse_label(fields[clean_ix]));
    } catch (const std::invalid_argument&) {
      throw CliError(kExitIo, "malformed numeric field in " + path);
    }
  }
  const int n = static_cast<int>(labels.size());
  DatasetHandle data;
  check(lindml_dataset_create(dim, n, z.data(), labels.data(),
                              clean_ix >= 0 ? clean.data() : nullptr,
                              data.out()),
        "building dataset from " + path);
  return data;
}

DatasetHandle load_flexible(const std::string& path,
                            const std::string& label_column,
                            const std::string& clean_column) {
  return label_column.empty()
             ? load_canonical(path)
             : load_with_label_column(path, label_column, clean_column);
}

// ------------------------------------------------------------- gen command

struct GenOptions {
  std::string out_dir;
  std::uint64_t seed = 0;
  int dim = 10;
  int rank = 5;
  std::string m_star_eigs = "0.32,0.89,0.59,0.13,0.14";
  std::string sigma_eigs = "0.73,0.7,0.68,0.59,0.47,0.45,0.21,0.19,0.11,0.04";
  double tau_star = 1.3;
  int n_pairs = 20000;
  int n_train = 15000;
  std::string regime = "norm";
  std::string noise = "logistic";
  double target_mislabel = 0.10;
  double flip_p = 0.2;
};

int run_gen(const GenOptions& opt) {
  const std::vector<double> m_eigs = parse_double_list(opt.m_star_eigs);
  const std::vector<double> s_eigs = parse_double_list(opt.sigma_eigs);
  if (static_cast<int>(m_eigs.size()) != opt.rank) {
    throw CliError(kExitConfig, "--mstar-eigs must list exactly --rank values");
  }
  if (static_cast<int>(s_eigs.size()) != opt.dim) {
    throw CliError(kExitConfig, "--sigma-eigs must list exactly --dim values");
  }
  if (opt.n_train > opt.n_pairs) {
    throw CliError(kExitConfig, "--train cannot exceed --n");
  }
  if (opt.regime != "norm" && opt.regime != "flip") {
    throw CliError(kExitConfig, "--regime must be norm or flip");
  }

  lindml_synthetic_spec spec;
  lindml_synthetic_spec_default(&spec);
  spec.dim = opt.dim;
  spec.rank = opt.rank;
  spec.m_star_eigs = m_eigs.data();
  spec.sigma_eigs = s_eigs.data();
  spec.tau_star = opt.tau_star;
  spec.n_pairs = opt.n_pairs;
  spec.regime = opt.regime == "norm" ? LINDML_REGIME_NORM_NOISE
                                     : LINDML_REGIME_LABEL_FLIP;
  spec.noise_kind = noise_kind_from_flag(opt.noise);
  spec.target_mislabel = opt.target_mislabel;
  spec.flip_p = opt.flip_p;
  spec.seed = opt.seed;

  DatasetHandle data;
  MetricHandle star;
  double realized = 0.0, scale = 0.0;
  check(lindml_generate(&spec, data.out(), star.out(), &realized, &scale),
        "generating data");

  const int n_test = opt.n_pairs - opt.n_train;
  DatasetHandle train, test;
  check(lindml_dataset_slice(data.get(), 0, opt.n_train, train.out()),
        "splitting train");
  check(lindml_dataset_slice(data.get(), opt.n_train, n_test, test.out()),
        "splitting test");

  fs::create_directories(opt.out_dir);
  const fs::path dir(opt.out_dir);
  check(lindml_dataset_save(train.get(), (dir / "train.csv").c_str()),
        "writing train.csv");
  check(lindml_dataset_save(test.get(), (dir / "test.csv").c_str()),
        "writing test.csv");
  check(lindml_metric_model_save(star.get(), opt.seed, opt.noise.c_str(), "",
                                 nullptr, (dir / "star.json").c_str()),
        "writing star.json");

  double support = 0.0;
  check(lindml_dataset_support_bound(data.get(), &support), "support bound");
  int far = 0;
  if (opt.n_pairs > 0) {
    std::vector<int> labels(opt.n_pairs);
    check(lindml_dataset_labels(data.get(), LINDML_LABELS_NOISY, labels.data()),
          "labels");
    for (int v : labels) far += v == 1;
  }
  const double far_fraction =
      opt.n_pairs > 0 ? static_cast<double>(far) / opt.n_pairs : 0.0;
  check(lindml_write_sidecar(&spec, realized, scale, far_fraction, support,
                             opt.n_train, n_test, (dir / "gen.json").c_str()),
        "writing gen.json");

  std::cout << "wrote " << (dir / "train.csv").string() << " ("
            << opt.n_train << " pairs), " << (dir / "test.csv").string()
            << " (" << n_test << " pairs)\n"
            << "realized mislabel fraction: " << fmt(realized)
            << ", far fraction: " << fmt(far_fraction) << "\n";
  return kExitOk;
}

// ------------------------------------------------------------- fit command

struct FitOptions {
  std::string data_path;
  std::string noise = "logistic";
  double scale = 1.0;
  std::string out_model = "model.json";
  std::string out_history;
  std::string normalize = "none";
  std::string label_column;
  std::string clean_column;
  std::string created;
  lindml_solver_config solver{};
};

int run_fit(const FitOptions& opt) {
  DatasetHandle data =
      load_flexible(opt.data_path, opt.label_column, opt.clean_column);
  const int dim = lindml_dataset_dim(data.get());
  const lindml_noise_kind kind = noise_kind_from_flag(opt.noise);

  lindml_normalize_mode mode = LINDML_NORMALIZE_NONE;
  if (opt.normalize == "standardize") {
    mode = LINDML_NORMALIZE_STANDARDIZE;
  } else if (opt.normalize == "whiten") {
    mode = LINDML_NORMALIZE_WHITEN;
  } else if (opt.normalize != "none") {
    throw CliError(kExitConfig,
                   "--normalize must be none, standardize, or whiten");
  }

  DatasetHandle transformed;
  std::vector<double> u(static_cast<std::size_t>(dim) * dim);
  const lindml_dataset* fit_data = data.get();
  if (mode != LINDML_NORMALIZE_NONE) {
    check(lindml_dataset_normalize(data.get(), mode, transformed.out(),
                                   u.data()),
          "normalizing data");
    fit_data = transformed.get();
  }

  FitHandle fit;
  check(lindml_fit(fit_data, kind, opt.scale, &opt.solver, fit.out()),
        "fitting");

  FactorHandle factor;
  check(lindml_fit_result_model(fit.get(), factor.out()), "extracting model");
  MetricHandle metric;
  check(lindml_factor_to_metric(factor.get(), metric.out()),
        "converting model");

  MetricHandle final_metric;
  FactorHandle final_factor;
  if (mode != LINDML_NORMALIZE_NONE) {
    check(lindml_back_transform(metric.get(), u.data(), final_metric.out()),
          "back-transforming model");
    check(lindml_back_transform_factor(factor.get(), u.data(),
                                       final_factor.out()),
          "back-transforming factor");
  } else {
    final_metric = std::move(metric);
    final_factor = std::move(factor);
  }

  check(lindml_metric_model_save(final_metric.get(), opt.solver.seed,
                                 opt.noise.c_str(), opt.created.c_str(),
                                 final_factor.get(), opt.out_model.c_str()),
        "writing " + opt.out_model);
  if (!opt.out_history.empty()) {
    check(lindml_fit_result_save(fit.get(), opt.solver.seed, opt.noise.c_str(),
                                 opt.created.c_str(), nullptr,
                                 opt.out_history.c_str()),
          "writing " + opt.out_history);
  }

  const int hsize = lindml_fit_result_history_size(fit.get());
  std::vector<int> hiter(hsize);
  std::vector<double> hval(hsize);
  check(lindml_fit_result_history(fit.get(), hiter.data(), hval.data()),
        "history");
  std::cout << "fit: " << lindml_fit_result_iterations(fit.get())
            << " iterations, final risk " << fmt(hval.empty() ? 0.0 : hval.back())
            << ", wall time " << fmt(lindml_fit_result_wall_time(fit.get()))
            << " s\nwrote " << opt.out_model << "\n";
  return kExitOk;
}

// ------------------------------------------------------------ eval command

struct EvalOptions {
  std::string model_path;
  std::string train_path;
  std::string test_path;
  std::string star_path;
  std::string noise = "logistic";
  double scale = 1.0;
  std::string out_report = "report.json";
  std::string out_csv;
  std::string label_column;
  std::string clean_column;
};

double realized_mislabel_of(const lindml_dataset* data) {
  if (lindml_dataset_has_clean(data) == 0) return 0.0;
  const int n = lindml_dataset_size(data);
  if (n == 0) return 0.0;
  std::vector<int> noisy(n), clean(n);
  check(lindml_dataset_labels(data, LINDML_LABELS_NOISY, noisy.data()),
        "labels");
  check(lindml_dataset_labels(data, LINDML_LABELS_CLEAN, clean.data()),
        "labels");
  int mismatches = 0;
  for (int i = 0; i < n; ++i) mismatches += noisy[i] != clean[i];
  return static_cast<double>(mismatches) / n;
}

lindml_eval_report evaluate_model(const lindml_metric_model* model,
                                  const lindml_dataset* train,
                                  const lindml_dataset* test,
                                  const lindml_metric_model* star,
                                  lindml_noise_kind kind, double scale) {
  lindml_eval_report report{};
  check(lindml_accuracy(model, train, LINDML_LABELS_NOISY,
                        &report.train_acc_noisy),
        "train accuracy");
  check(lindml_accuracy(model, test, LINDML_LABELS_NOISY,
                        &report.test_acc_noisy),
        "test accuracy");
  report.has_clean = lindml_dataset_has_clean(train) != 0 &&
                     lindml_dataset_has_clean(test) != 0;
  if (report.has_clean) {
    check(lindml_accuracy(model, train, LINDML_LABELS_CLEAN,
                          &report.train_acc_clean),
          "train clean accuracy");
    check(lindml_accuracy(model, test, LINDML_LABELS_CLEAN,
                          &report.test_acc_clean),
          "test clean accuracy");
    report.realized_mislabel = realized_mislabel_of(train);
  }
  if (star != nullptr) {
    report.has_star = 1;
    check(lindml_relative_errors(model, star, &report.rel_spectral,
                                 &report.rel_frobenius),
          "relative errors");
  }
  check(lindml_empirical_risk_metric(train, kind, scale, model,
                                     &report.loss_final),
        "empirical risk");
  return report;
}

// Descending spectrum of M / tau (falls back to the raw spectrum when the
// threshold is zero).
std::vector<double> normalized_spectrum(const lindml_metric_model* model) {
  const int d = lindml_metric_model_dim(model);
  std::vector<double> eigs(d);
  check(lindml_metric_model_eigenvalues(model, eigs.data()), "eigenvalues");
  const double tau = lindml_metric_model_tau(model);
  if (tau > 0.0) {
    for (double& e : eigs) e /= tau;
  }
  return eigs;
}

int run_eval(const EvalOptions& opt) {
  MetricHandle model;
  check(lindml_metric_model_load(opt.model_path.c_str(), model.out()),
        "loading " + opt.model_path);
  DatasetHandle train =
      load_flexible(opt.train_path, opt.label_column, opt.clean_column);
  DatasetHandle test =
      load_flexible(opt.test_path, opt.label_column, opt.clean_column);
  MetricHandle star;
  if (!opt.star_path.empty()) {
    check(lindml_metric_model_load(opt.star_path.c_str(), star.out()),
          "loading " + opt.star_path);
  }
  const lindml_noise_kind kind = noise_kind_from_flag(opt.noise);
  const lindml_eval_report report = evaluate_model(
      model.get(), train.get(), test.get(), star.get(), kind, opt.scale);

  const std::vector<double> eig_hat = normalized_spectrum(model.get());
  std::vector<double> eig_star;
  if (star) eig_star = normalized_spectrum(star.get());
  check(lindml_eval_report_save_full(
            &report, eig_hat.data(), star ? eig_star.data() : nullptr,
            static_cast<int>(eig_hat.size()), opt.out_report.c_str()),
        "writing " + opt.out_report);

  if (!opt.out_csv.empty()) {
    char header[512], row[1024];
    check(lindml_eval_report_csv_header(header, sizeof(header)), "csv header");
    check(lindml_eval_report_csv_row(&report, row, sizeof(row)), "csv row");
    auto out = open_out(opt.out_csv);
    out << header << '\n' << row << '\n';
  }

  std::cout << "test accuracy (noisy labels): " << fmt(report.test_acc_noisy)
            << "\n";
  if (report.has_clean) {
    std::cout << "test accuracy (clean labels): "
              << fmt(report.test_acc_clean) << "\n";
  }
  if (report.has_star) {
    std::cout << "relative error, spectral: " << fmt(report.rel_spectral)
              << ", frobenius: " << fmt(report.rel_frobenius) << "\n";
  }
  std::cout << "wrote " << opt.out_report << "\n";
  return kExitOk;
}

// -------------------------------------------------------- truncate command

struct TruncateOptions {
  std::string model_path;
  int k = 0;
  std::string train_path;
  std::string test_path;
  std::string star_path;
  std::string noise = "logistic";
  double scale = 1.0;
  std::string out_model = "model_truncated.json";
  std::string out_report = "truncate_report.json";
};

int run_truncate(const TruncateOptions& opt) {
  MetricHandle model;
  check(lindml_metric_model_load(opt.model_path.c_str(), model.out()),
        "loading " + opt.model_path);
  DatasetHandle train = load_canonical(opt.train_path);
  DatasetHandle test = load_canonical(opt.test_path);
  MetricHandle star;
  if (!opt.star_path.empty()) {
    check(lindml_metric_model_load(opt.star_path.c_str(), star.out()),
          "loading " + opt.star_path);
  }

  MetricHandle truncated;
  double gamma = 0.0;
  check(lindml_truncate_metric(model.get(), opt.k, truncated.out(), &gamma),
        "truncating");
  check(lindml_metric_model_save(truncated.get(), 0, opt.noise.c_str(), "",
                                 nullptr, opt.out_model.c_str()),
        "writing " + opt.out_model);

  const lindml_noise_kind kind = noise_kind_from_flag(opt.noise);
  const lindml_eval_report before = evaluate_model(
      model.get(), train.get(), test.get(), star.get(), kind, opt.scale);
  const lindml_eval_report after = evaluate_model(
      truncated.get(), train.get(), test.get(), star.get(), kind, opt.scale);

  json doc;
  doc["k"] = opt.k;
  doc["gamma"] = gamma;
  auto block = [](const lindml_eval_report& r) {
    json j;
    j["train_acc_noisy"] = r.train_acc_noisy;
    j["test_acc_noisy"] = r.test_acc_noisy;
    if (r.has_clean) {
      j["train_acc_clean"] = r.train_acc_clean;
      j["test_acc_clean"] = r.test_acc_clean;
    }
    if (r.has_star) {
      j["rel_spectral"] = r.rel_spectral;
      j["rel_frobenius"] = r.rel_frobenius;
    }
    j["risk"] = r.loss_final;
    return j;
  };
  doc["before"] = block(before);
  doc["after"] = block(after);
  auto out = open_out(opt.out_report);
  out << doc.dump(2) << '\n';

  std::cout << "truncated to rank " << opt.k << ", gamma " << fmt(gamma)
            << "\n";
  if (before.has_clean) {
    std::cout << "clean test accuracy " << fmt(before.test_acc_clean)
              << " -> " << fmt(after.test_acc_clean) << "\n";
  }
  std::cout << "wrote " << opt.out_model << " and " << opt.out_report << "\n";
  return kExitOk;
}

// ------------------------------------------------------ complexity command

struct ComplexityOptions {
  double eps = 0.1;
  double delta = 0.05;
  int d = 10;
  double zeta = 1.0;
  double big_f = 1.0;
  double big_b = 1.0;
  double beta = 1.0;
  double big_t = 2.0;
  double alpha = 0.0;  // 0 = use eps
  double c = 0.0;      // recovery bound inputs; 0 = skip
  double omega = 0.0;
  std::string out;
};

int run_complexity(const ComplexityOptions& opt) {
  double n = 0.0;
  int meta_ok = 1;
  check(lindml_sample_complexity(opt.eps, opt.delta, opt.d, opt.zeta,
                                 opt.big_f, opt.big_b, opt.beta, opt.big_t,
                                 &meta_ok, &n),
        "sample complexity");
  const double alpha = opt.alpha > 0.0 ? opt.alpha : opt.eps;
  double log_cover = 0.0;
  check(lindml_log_cover_size(alpha, opt.d, opt.big_b, opt.beta, &log_cover),
        "cover size");

  json doc;
  doc["sample_complexity"] = n;
  doc["sample_complexity_ceil"] = std::ceil(n);
  doc["log_cover_size"] = log_cover;
  doc["alpha"] = alpha;
  doc["meta_assumption_ok"] = meta_ok != 0;

  std::cout << "sample complexity N(eps=" << fmt(opt.eps)
            << ", delta=" << fmt(opt.delta) << ", d=" << opt.d
            << ") = " << fmt(n) << " (ceil " << fmt(std::ceil(n)) << ")\n";
  std::cout << "log cover size at radius " << fmt(alpha) << " = "
            << fmt(log_cover) << "\n";
  if (!meta_ok) {
    std::cerr << "warning: B > beta * F; the bounded-argument assumption "
                 "does not hold for these constants\n";
  }
  if (opt.c > 0.0 && opt.omega > 0.0) {
    double log_value = 0.0, value = 0.0;
    check(lindml_recovery_bound(opt.eps, opt.d, opt.c, opt.omega, &log_value,
                                &value),
          "recovery bound");
    doc["recovery_bound_log"] = log_value;
    if (value > 0.0 && std::isfinite(value)) {
      doc["recovery_bound"] = value;
    }
    std::cout << "recovery-bound risk gap: log " << fmt(log_value);
    if (value > 0.0 && std::isfinite(value)) {
      std::cout << " (= " << fmt(value) << ")";
    }
    std::cout << "\n";
  }
  if (!opt.out.empty()) {
    auto out = open_out(opt.out);
    out << doc.dump(2) << '\n';
  }
  return kExitOk;
}

// ------------------------------------------------------ experiment command

struct ExperimentCell {
  std::string label;
  lindml_regime regime;
  lindml_noise_kind gen_noise;
  double target_mislabel;
  double flip_p;
  int n_train;
  int n_test;
};

struct RunRow {
  int cell = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double realized = 0.0;
  double scale = 0.0;
  lindml_eval_report report{};
  double trunc_test_acc_clean = 0.0;
  double trunc_gamma = 0.0;
  bool has_trunc = false;
};

struct ExperimentPlan {
  int dim = 10;
  int rank = 5;
  std::vector<double> m_star_eigs = {0.32, 0.89, 0.59, 0.13, 0.14};
  std::vector<double> sigma_eigs = {0.73, 0.7,  0.68, 0.59, 0.47,
                                    0.45, 0.21, 0.19, 0.11, 0.04};
  double tau_star = 1.3;
  int n_train = 15000;
  int n_test = 5000;
  std::string regime = "norm";
  std::string gen_noise = "logistic";
  double target_mislabel = 0.10;
  double flip_p = 0.2;
  lindml_solver_config solver{};
  std::string model_noise = "logistic";
  double model_scale = 1.0;
  std::string sweep = "none";
  std::vector<double> noise_levels = {0.05, 0.1, 0.2, 0.3, 0.4, 0.45};
  std::vector<int> sample_sizes = {500, 1000, 5000, 15000, 50000};
  int repetitions = 20;
  std::uint64_t seed = 1;
  int truncate_to = 0;
  int workers = 0;
  std::string output_dir = "experiment_out";
};

ExperimentPlan plan_from_config(const IniConfig& config) {
  ExperimentPlan plan;
  lindml_solver_config_default(&plan.solver);
  plan.dim = config.get_int("data.dim", plan.dim);
  plan.rank = config.get_int("data.rank", plan.rank);
  if (config.has("data.mstar_eigs")) {
    plan.m_star_eigs = parse_double_list(config.get("data.mstar_eigs", ""));
  }
  if (config.has("data.sigma_eigs")) {
    plan.sigma_eigs = parse_double_list(config.get("data.sigma_eigs", ""));
  }
  plan.tau_star = config.get_double("data.tau_star", plan.tau_star);
  plan.n_train = config.get_int("data.n_train", plan.n_train);
  plan.n_test = config.get_int("data.n_test", plan.n_test);
  plan.regime = config.get("data.regime", plan.regime);
  plan.gen_noise = config.get("data.gen_noise", plan.gen_noise);
  plan.target_mislabel =
      config.get_double("data.target_mislabel", plan.target_mislabel);
  plan.flip_p = config.get_double("data.flip_p", plan.flip_p);

  plan.solver.learning_rate =
      config.get_double("solver.learning_rate", plan.solver.learning_rate);
  plan.solver.decay = config.get_double("solver.decay", plan.solver.decay);
  plan.solver.max_iters =
      config.get_int("solver.max_iters", plan.solver.max_iters);
  plan.solver.rank_bound =
      config.get_int("solver.rank_bound", plan.solver.rank_bound);
  plan.solver.init_scale =
      config.get_double("solver.init_scale", plan.solver.init_scale);
  plan.solver.batch_size =
      config.get_int("solver.batch_size", plan.solver.batch_size);
  plan.solver.stop_tol =
      config.get_double("solver.stop_tol", plan.solver.stop_tol);
  plan.solver.history_stride =
      config.get_int("solver.history_stride", plan.solver.history_stride);
  plan.solver.decay_interval =
      config.get_int("solver.decay_interval", plan.solver.decay_interval);

  plan.model_noise = config.get("model.noise", plan.model_noise);
  plan.model_scale = config.get_double("model.scale", plan.model_scale);

  plan.sweep = config.get("experiment.sweep", plan.sweep);
  if (config.has("experiment.noise_levels")) {
    plan.noise_levels =
        parse_double_list(config.get("experiment.noise_levels", ""));
  }
  if (config.has("experiment.sample_sizes")) {
    plan.sample_sizes =
        parse_int_list(config.get("experiment.sample_sizes", ""));
  }
  plan.repetitions = config.get_int("experiment.repetitions", plan.repetitions);
  plan.seed = config.get_u64("experiment.seed", plan.seed);
  plan.truncate_to = config.get_int("experiment.truncate_to", plan.truncate_to);
  plan.workers = config.get_int("experiment.workers", plan.workers);
  plan.output_dir = config.get("experiment.output_dir", plan.output_dir);
  return plan;
}

std::vector<ExperimentCell> cells_of(const ExperimentPlan& plan) {
  std::vector<ExperimentCell> cells;
  const lindml_regime base_regime = plan.regime == "flip"
                                        ? LINDML_REGIME_LABEL_FLIP
                                        : LINDML_REGIME_NORM_NOISE;
  const lindml_noise_kind base_kind = noise_kind_from_flag(plan.gen_noise);
  if (plan.sweep == "none") {
    cells.push_back({plan.regime == "flip" ? "flip" : plan.gen_noise,
                     base_regime, base_kind, plan.target_mislabel, plan.flip_p,
                     plan.n_train, plan.n_test});
  } else if (plan.sweep == "noise_kind") {
    for (const char* kind : {"logistic", "normal", "laplace", "hs"}) {
      cells.push_back({kind, LINDML_REGIME_NORM_NOISE,
                       noise_kind_from_flag(kind), plan.target_mislabel,
                       plan.flip_p, plan.n_train, plan.n_test});
    }
    // Matched mislabel rate: a coin with head chance 2*target mislabels
    // half of the affected points in expectation.
    cells.push_back({"flip", LINDML_REGIME_LABEL_FLIP, base_kind,
                     plan.target_mislabel, 2.0 * plan.target_mislabel,
                     plan.n_train, plan.n_test});
  } else if (plan.sweep == "noise_level") {
    for (double level : plan.noise_levels) {
      cells.push_back({"level=" + fmt(level), LINDML_REGIME_NORM_NOISE,
                       base_kind, level, 2.0 * level, plan.n_train,
                       plan.n_test});
    }
  } else if (plan.sweep == "sample_size") {
    for (int n : plan.sample_sizes) {
      cells.push_back({"n=" + std::to_string(n), base_regime, base_kind,
                       plan.target_mislabel, plan.flip_p, n, plan.n_test});
    }
  } else {
    throw CliError(kExitConfig, "unknown sweep: " + plan.sweep);
  }
  return cells;
}

RunRow run_cell(const ExperimentPlan& plan, const ExperimentCell& cell,
                int cell_ix, int rep) {
  RunRow row;
  row.cell = cell_ix;
  row.rep = rep;
  row.seed = plan.seed + static_cast<std::uint64_t>(rep);
  try {
    lindml_synthetic_spec spec;
    lindml_synthetic_spec_default(&spec);
    spec.dim = plan.dim;
    spec.rank = plan.rank;
    spec.m_star_eigs = plan.m_star_eigs.data();
    spec.sigma_eigs = plan.sigma_eigs.data();
    spec.tau_star = plan.tau_star;
    spec.n_pairs = cell.n_train + cell.n_test;
    spec.regime = cell.regime;
    spec.noise_kind = cell.gen_noise;
    spec.target_mislabel = cell.target_mislabel;
    spec.flip_p = cell.flip_p;
    spec.seed = row.seed;

    DatasetHandle data;
    MetricHandle star;
    check(lindml_generate(&spec, data.out(), star.out(), &row.realized,
                          &row.scale),
          "generate");
    DatasetHandle train, test;
    check(lindml_dataset_slice(data.get(), 0, cell.n_train, train.out()),
          "train split");
    check(lindml_dataset_slice(data.get(), cell.n_train, cell.n_test,
                               test.out()),
          "test split");

    lindml_solver_config solver = plan.solver;
    solver.seed = row.seed;
    FitHandle fit;
    check(lindml_fit(train.get(), noise_kind_from_flag(plan.model_noise),
                     plan.model_scale, &solver, fit.out()),
          "fit");
    check(lindml_evaluate(fit.get(), train.get(), test.get(), star.get(),
                          &row.report),
          "evaluate");

    if (plan.truncate_to > 0) {
      FactorHandle factor;
      check(lindml_fit_result_model(fit.get(), factor.out()), "model");
      MetricHandle metric;
      check(lindml_factor_to_metric(factor.get(), metric.out()), "convert");
      MetricHandle truncated;
      check(lindml_truncate_metric(metric.get(), plan.truncate_to,
                                   truncated.out(), &row.trunc_gamma),
            "truncate");
      check(lindml_accuracy(truncated.get(), test.get(), LINDML_LABELS_CLEAN,
                            &row.trunc_test_acc_clean),
            "truncated accuracy");
      row.has_trunc = true;
    }
    row.ok = true;
  } catch (const CliError& e) {
    row.ok = false;
    row.error = e.what();
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

int run_experiment(const ExperimentPlan& plan,
                   const std::vector<ExperimentCell>& cells) {
  fs::create_directories(plan.output_dir);
  const fs::path dir(plan.output_dir);

  const int n_tasks = static_cast<int>(cells.size()) * plan.repetitions;
  std::vector<RunRow> rows(n_tasks);
  std::atomic<int> cursor{0};
  int workers = plan.workers > 0
                    ? plan.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, n_tasks);

  auto work = [&] {
    while (true) {
      const int task = cursor.fetch_add(1);
      if (task >= n_tasks) break;
      const int cell_ix = task / plan.repetitions;
      const int rep = task % plan.repetitions;
      rows[task] = run_cell(plan, cells[cell_ix], cell_ix, rep);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();

  // Per-run rows.
  {
    auto out = open_out((dir / "runs.csv").string());
    // No timing columns: rerunning an experiment must reproduce these
    // files byte for byte.
    out << "cell,label,rep,seed,status,realized_mislabel,noise_scale,"
           "train_acc_noisy,train_acc_clean,test_acc_noisy,test_acc_clean,"
           "rel_spectral,rel_frobenius,loss_final,iterations";
    if (plan.truncate_to > 0) out << ",trunc_test_acc_clean,trunc_gamma";
    out << '\n';
    for (const RunRow& row : rows) {
      const ExperimentCell& cell = cells[row.cell];
      out << row.cell << ',' << cell.label << ',' << row.rep << ',' << row.seed
          << ',' << (row.ok ? "ok" : "error:" + row.error) << ','
          << fmt(row.realized) << ',' << fmt(row.scale) << ','
          << fmt(row.report.train_acc_noisy) << ','
          << fmt(row.report.train_acc_clean) << ','
          << fmt(row.report.test_acc_noisy) << ','
          << fmt(row.report.test_acc_clean) << ','
          << fmt(row.report.rel_spectral) << ','
          << fmt(row.report.rel_frobenius) << ','
          << fmt(row.report.loss_final) << ',' << row.report.iterations_run;
      if (plan.truncate_to > 0) {
        out << ',' << fmt(row.trunc_test_acc_clean) << ','
            << fmt(row.trunc_gamma);
      }
      out << '\n';
    }
  }

  // Mean aggregation per cell over successful runs.
  {
    auto out = open_out((dir / "summary.csv").string());
    out << "cell,label,runs_ok,runs_failed,realized_mislabel,"
           "train_acc_noisy,train_acc_clean,test_acc_noisy,test_acc_clean,"
           "rel_spectral,rel_frobenius,loss_final";
    if (plan.truncate_to > 0) out << ",trunc_test_acc_clean";
    out << '\n';
    for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
      int ok = 0, failed = 0;
      double realized = 0, tan = 0, tac = 0, ten = 0, tec = 0, rs = 0, rf = 0,
             loss = 0, trunc = 0;
      for (const RunRow& row : rows) {
        if (row.cell != c) continue;
        if (!row.ok) {
          ++failed;
          continue;
        }
        ++ok;
        realized += row.realized;
        tan += row.report.train_acc_noisy;
        tac += row.report.train_acc_clean;
        ten += row.report.test_acc_noisy;
        tec += row.report.test_acc_clean;
        rs += row.report.rel_spectral;
        rf += row.report.rel_frobenius;
        loss += row.report.loss_final;
        trunc += row.trunc_test_acc_clean;
      }
      const double denom = ok > 0 ? ok : 1;
      out << c << ',' << cells[c].label << ',' << ok << ',' << failed << ','
          << fmt(realized / denom) << ',' << fmt(tan / denom) << ','
          << fmt(tac / denom) << ',' << fmt(ten / denom) << ','
          << fmt(tec / denom) << ',' << fmt(rs / denom) << ','
          << fmt(rf / denom) << ',' << fmt(loss / denom);
      if (plan.truncate_to > 0) out << ',' << fmt(trunc / denom);
      out << '\n';
    }
  }

  int failures = 0;
  for (const RunRow& row : rows) failures += row.ok ? 0 : 1;
  std::cout << "experiment: " << n_tasks - failures << "/" << n_tasks
            << " runs succeeded; wrote " << (dir / "runs.csv").string()
            << " and " << (dir / "summary.csv").string() << "\n";
  if (failures > 0) {
    std::cerr << "warning: " << failures
              << " run(s) failed; see the status column in runs.csv\n";
  }
  return kExitOk;
}

void add_solver_flags(CLI::App* cmd, lindml_solver_config* solver) {
  lindml_solver_config_default(solver);
  cmd->add_option("--lr", solver->learning_rate, "learning rate")
      ->capture_default_str();
  cmd->add_option("--decay", solver->decay, "learning-rate decay factor")
      ->capture_default_str();
  cmd->add_option("--iters", solver->max_iters, "iteration budget")
      ->capture_default_str();
  cmd->add_option("--rank", solver->rank_bound,
                  "factor rank bound (0 = full rank)")
      ->capture_default_str();
  cmd->add_option("--init-scale", solver->init_scale,
                  "factor initialization scale")
      ->capture_default_str();
  cmd->add_option("--batch", solver->batch_size,
                  "minibatch size (0 = full batch)")
      ->capture_default_str();
  cmd->add_option("--stop-tol", solver->stop_tol,
                  "gradient-norm stopping threshold")
      ->capture_default_str();
  cmd->add_option("--stride", solver->history_stride,
                  "loss-history recording stride")
      ->capture_default_str();
  cmd->add_option("--decay-interval", solver->decay_interval,
                  "iterations between decay steps")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear distance metric learning from noisy Close/Far pairs"};
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a synthetic dataset");
  gen_cmd->add_option("--out", gen.out_dir, "output directory")->required();
  gen_cmd->add_option("--seed", gen.seed, "generation seed")
      ->capture_default_str();
  gen_cmd->add_option("--dim", gen.dim, "dimension")->capture_default_str();
  gen_cmd->add_option("--rank", gen.rank, "ground-truth rank")
      ->capture_default_str();
  gen_cmd->add_option("--mstar-eigs", gen.m_star_eigs,
                      "nonzero ground-truth eigenvalues (comma separated)")
      ->capture_default_str();
  gen_cmd->add_option("--sigma-eigs", gen.sigma_eigs,
                      "covariance eigenvalues (comma separated)")
      ->capture_default_str();
  gen_cmd->add_option("--tau-star", gen.tau_star, "ground-truth threshold")
      ->capture_default_str();
  gen_cmd->add_option("--n", gen.n_pairs, "total pairs")->capture_default_str();
  gen_cmd->add_option("--train", gen.n_train, "training pairs")
      ->capture_default_str();
  gen_cmd->add_option("--regime", gen.regime, "labeling regime: norm | flip")
      ->capture_default_str();
  gen_cmd->add_option("--noise", gen.noise,
                      "noise kind: logistic | normal | laplace | hs")
      ->capture_default_str();
  gen_cmd->add_option("--target-mislabel", gen.target_mislabel,
                      "target mislabel fraction (norm regime)")
      ->capture_default_str();
  gen_cmd->add_option("--flip-p", gen.flip_p,
                      "coin probability (flip regime; mislabels p/2)")
      ->capture_default_str();

  FitOptions fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a metric to a dataset");
  fit_cmd->add_option("--data", fit.data_path, "training dataset file")
      ->required();
  fit_cmd->add_option("--noise", fit.noise, "loss noise kind")
      ->capture_default_str();
  fit_cmd->add_option("--scale", fit.scale, "loss noise scale")
      ->capture_default_str();
  fit_cmd->add_option("--out", fit.out_model, "model output file")
      ->capture_default_str();
  fit_cmd->add_option("--history", fit.out_history,
                      "loss-history output file (optional)");
  fit_cmd->add_option("--normalize", fit.normalize,
                      "preprocessing: none | standardize | whiten")
      ->capture_default_str();
  fit_cmd->add_option("--label-column", fit.label_column,
                      "label column name for generic delimited input");
  fit_cmd->add_option("--clean-column", fit.clean_column,
                      "clean-label column name for generic delimited input");
  fit_cmd->add_option("--created", fit.created,
                      "metadata timestamp (omitted by default so reruns are "
                      "byte-identical)");
  fit_cmd->add_option("--seed", fit.solver.seed, "solver seed");
  add_solver_flags(fit_cmd, &fit.solver);

  EvalOptions eval;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "evaluate a model on train/test datasets");
  eval_cmd->add_option("--model", eval.model_path, "model file")->required();
  eval_cmd->add_option("--train", eval.train_path, "training dataset")
      ->required();
  eval_cmd->add_option("--test", eval.test_path, "test dataset")->required();
  eval_cmd->add_option("--star", eval.star_path,
                       "ground-truth model file (optional)");
  eval_cmd->add_option("--noise", eval.noise, "loss noise kind")
      ->capture_default_str();
  eval_cmd->add_option("--scale", eval.scale, "loss noise scale")
      ->capture_default_str();
  eval_cmd->add_option("--out", eval.out_report, "report output file")
      ->capture_default_str();
  eval_cmd->add_option("--csv", eval.out_csv, "delimited report row (optional)");
  eval_cmd->add_option("--label-column", eval.label_column,
                       "label column name for generic delimited input");
  eval_cmd->add_option("--clean-column", eval.clean_column,
                       "clean-label column name for generic delimited input");

  TruncateOptions trunc;
  CLI::App* trunc_cmd =
      app.add_subcommand("truncate", "truncate a model to rank k and re-score");
  trunc_cmd->add_option("--model", trunc.model_path, "model file")->required();
  trunc_cmd->add_option("--k", trunc.k, "target rank")->required();
  trunc_cmd->add_option("--train", trunc.train_path, "training dataset")
      ->required();
  trunc_cmd->add_option("--test", trunc.test_path, "test dataset")->required();
  trunc_cmd->add_option("--star", trunc.star_path,
                        "ground-truth model file (optional)");
  trunc_cmd->add_option("--noise", trunc.noise, "loss noise kind")
      ->capture_default_str();
  trunc_cmd->add_option("--scale", trunc.scale, "loss noise scale")
      ->capture_default_str();
  trunc_cmd->add_option("--out-model", trunc.out_model, "truncated model file")
      ->capture_default_str();
  trunc_cmd->add_option("--report", trunc.out_report, "report file")
      ->capture_default_str();

  ComplexityOptions cx;
  CLI::App* cx_cmd = app.add_subcommand(
      "complexity", "evaluate the sample-complexity and cover formulas");
  cx_cmd->add_option("--eps", cx.eps, "accuracy")->capture_default_str();
  cx_cmd->add_option("--delta", cx.delta, "confidence")->capture_default_str();
  cx_cmd->add_option("--d", cx.d, "dimension")->capture_default_str();
  cx_cmd->add_option("--zeta", cx.zeta, "log-Lipschitz constant")
      ->capture_default_str();
  cx_cmd->add_option("--F", cx.big_f, "support bound")->capture_default_str();
  cx_cmd->add_option("--B", cx.big_b, "threshold bound")->capture_default_str();
  cx_cmd->add_option("--beta", cx.beta, "spectral-norm bound")
      ->capture_default_str();
  cx_cmd->add_option("--T", cx.big_t, "loss bound")->capture_default_str();
  cx_cmd->add_option("--alpha", cx.alpha, "cover radius (default: eps)");
  cx_cmd->add_option("--c", cx.c, "density lower bound on the unit ball");
  cx_cmd->add_option("--omega", cx.omega, "density minimum");
  cx_cmd->add_option("--out", cx.out, "JSON output file (optional)");

  std::string config_path;
  std::string exp_out_dir;
  int exp_workers = 0;
  std::uint64_t exp_seed = 0;
  bool exp_seed_set = false;
  CLI::App* exp_cmd = app.add_subcommand(
      "experiment", "run a repetition/sweep grid and aggregate tables");
  exp_cmd->add_option("--config", config_path,
                      "experiment configuration file (INI; defaults "
                      "reproduce the canonical synthetic experiment)");
  exp_cmd->add_option("--out-dir", exp_out_dir, "override output directory");
  exp_cmd->add_option("--workers", exp_workers, "worker threads");
  exp_cmd->add_option("--seed", exp_seed, "override base seed")
      ->each([&](const std::string&) { exp_seed_set = true; });

  try {
    app.parse(argc, argv);

    if (gen_cmd->parsed()) return run_gen(gen);
    if (fit_cmd->parsed()) return run_fit(fit);
    if (eval_cmd->parsed()) return run_eval(eval);
    if (trunc_cmd->parsed()) return run_truncate(trunc);
    if (cx_cmd->parsed()) return run_complexity(cx);
    if (exp_cmd->parsed()) {
      ExperimentPlan plan = config_path.empty()
                                ? ExperimentPlan{}
                                : plan_from_config(IniConfig::load(config_path));
      if (config_path.empty()) lindml_solver_config_default(&plan.solver);
      if (!exp_out_dir.empty()) plan.output_dir = exp_out_dir;
      if (exp_workers > 0) plan.workers = exp_workers;
      if (exp_seed_set) plan.seed = exp_seed;
      return run_experiment(plan, cells_of(plan));
    }
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
