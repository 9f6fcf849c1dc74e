#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lindml.h"

namespace cli {

// Exit codes: 0 success, 2 configuration, 3 IO, 4 numeric divergence,
// 5 infeasible target, 1 anything else.
enum ExitCode {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitDiverged = 4,
  kExitInfeasible = 5,
};

struct CliError : std::runtime_error {
  CliError(int code, const std::string& what)
      : std::runtime_error(what), exit_code(code) {}
  int exit_code;
};

inline int exit_code_for(lindml_status status) {
  switch (status) {
    case LINDML_OK: return kExitOk;
    case LINDML_ERR_IO: return kExitIo;
    case LINDML_ERR_DIVERGED: return kExitDiverged;
    case LINDML_ERR_INFEASIBLE: return kExitInfeasible;
    case LINDML_ERR_INVALID_ARGUMENT:
    case LINDML_ERR_DIMENSION_MISMATCH:
    case LINDML_ERR_DOMAIN: return kExitConfig;
    default: return kExitFailure;
  }
}

inline void check(lindml_status status, const std::string& context) {
  if (status != LINDML_OK) {
    throw CliError(exit_code_for(status),
                   context + ": " + lindml_last_error());
  }
}

template <typename T, void (*Free)(T*)>
class Handle {
 public:
  Handle() = default;
  explicit Handle(T* ptr) : ptr_(ptr) {}
  ~Handle() { reset(); }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& other) noexcept : ptr_(other.ptr_) { other.ptr_ = nullptr; }
  Handle& operator=(Handle&& other) noexcept {
    if (this != &other) {
      reset();
      ptr_ = other.ptr_;
      other.ptr_ = nullptr;
    }
    return *this;
  }
  T** out() {
    reset();
    return &ptr_;
  }
  T* get() const { return ptr_; }
  explicit operator bool() const { return ptr_ != nullptr; }

 private:
  void reset() {
    if (ptr_ != nullptr) Free(ptr_);
    ptr_ = nullptr;
  }
  T* ptr_ = nullptr;
};

using DatasetHandle = Handle<lindml_dataset, lindml_dataset_free>;
using MetricHandle = Handle<lindml_metric_model, lindml_metric_model_free>;
using FactorHandle = Handle<lindml_factor_model, lindml_factor_model_free>;
using FitHandle = Handle<lindml_fit_result, lindml_fit_result_free>;

inline lindml_noise_kind noise_kind_from_flag(const std::string& name) {
  if (name == "logistic") return LINDML_NOISE_LOGISTIC;
  if (name == "normal" || name == "gaussian") return LINDML_NOISE_NORMAL;
  if (name == "laplace") return LINDML_NOISE_LAPLACE;
  if (name == "hs" || name == "hyperbolic_secant") {
    return LINDML_NOISE_HYPERBOLIC_SECANT;
  }
  throw CliError(kExitConfig, "unknown noise kind: " + name);
}

inline const char* noise_kind_flag(lindml_noise_kind kind) {
  switch (kind) {
    case LINDML_NOISE_LOGISTIC: return "logistic";
    case LINDML_NOISE_NORMAL: return "normal";
    case LINDML_NOISE_LAPLACE: return "laplace";
    case LINDML_NOISE_HYPERBOLIC_SECANT: return "hs";
  }
  return "?";
}

inline std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string field;
  while (std::getline(stream, field, ',')) {
    if (field.empty()) continue;
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw CliError(kExitConfig, "malformed numeric list entry: " + field);
    }
  }
  return values;
}

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (double v : parse_double_list(text)) values.push_back(static_cast<int>(v));
  return values;
}

// Flat INI-style configuration: [section] headers, key = value lines,
// '#' or ';' comments. Keys are stored as "section.key".
class IniConfig {
 public:
  static IniConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError(kExitIo, "cannot open config file: " + path);
    IniConfig config;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto comment = line.find_first_of("#;");
      if (comment != std::string::npos) line.erase(comment);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          throw CliError(kExitConfig, path + ":" + std::to_string(line_no) +
                                          ": unterminated section header");
        }
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw CliError(kExitConfig, path + ":" + std::to_string(line_no) +
                                        ": expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      config.values_[section.empty() ? key : section + "." + key] = value;
    }
    return config;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw CliError(kExitConfig, "config key " + key + " is not numeric");
    }
  }

  int get_int(const std::string& key, int fallback) const {
    return static_cast<int>(get_double(key, fallback));
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return std::stoull(it->second);
    } catch (const std::exception&) {
      throw CliError(kExitConfig, "config key " + key + " is not an integer");
    }
  }

 private:
  static std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace cli
