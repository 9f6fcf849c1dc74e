#pragma once

#include <optional>
#include <string>

#include "core/datagen.hpp"
#include "core/evaluation.hpp"
#include "core/types.hpp"

namespace lindml {

// Dataset file: delimited text with header z0..z{d-1},label[,clean_label],
// one row per pair, shortest-round-trip float formatting (re-reading
// reproduces the doubles bit for bit).
void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);

// Model file: JSON {dim, matrix (row-major, full precision), tau,
// metadata{seed, noise_kind, created}, optional factor (row-major d x k)}.
struct ModelMetadata {
  std::uint64_t seed = 0;
  std::string noise_kind;
  std::string created;  // caller-supplied; empty keeps outputs reproducible
};

void save_model(const MetricModel& model, const ModelMetadata& meta,
                const std::string& path,
                const std::optional<FactorModel>& factor = std::nullopt);

struct LoadedModel {
  MetricModel model;
  ModelMetadata metadata;
  std::optional<FactorModel> factor;
};
LoadedModel load_model(const std::string& path);

// Sidecar emitted next to generated datasets: the full recipe plus the
// realized mislabel fraction, support bound, class balance, and split.
void save_sidecar(const SyntheticSpec& spec, const GenerationResult& gen,
                  int train_count, int test_count, const std::string& path);

// Flat one-record report document plus a delimited row for table assembly.
void save_eval_report(const EvalReport& report, const std::string& path);
std::string eval_report_csv_header();
std::string eval_report_csv_row(const EvalReport& report);

// (iteration, R_N) rows.
void save_loss_history(const std::vector<std::pair<int, double>>& history,
                       const std::string& path);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace lindml
