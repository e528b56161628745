#pragma once

#include "l0iht/instance_gen.hpp"
#include "l0iht/io.hpp"
#include "l0iht/runner.hpp"

#include <string>
#include <vector>

namespace l0iht::cli {

using io::json;

/// Flat key -> value map. Every key has a typed default; unknown keys and
/// type mismatches are rejected.
class RunConfig {
 public:
  RunConfig();

  /// Nested objects are flattened to dotted keys; dotted keys are accepted
  /// as-is.
  void merge_file(const std::string& path);
  void merge_json(const json& j, const std::string& prefix = "");
  /// "key=value". Arrays take comma-separated items or a JSON array.
  void set(const std::string& assignment);
  /// Fills output.dir from L0IHT_OUTPUT_DIR (or ".") when empty.
  void resolve_output_dir();

  const json& values() const { return values_; }

  double num(const std::string& key) const;
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::string str(const std::string& key) const;
  std::vector<double> num_list(const std::string& key) const;
  std::vector<std::string> str_list(const std::string& key) const;

  SolverSettings solver_settings() const;
  InstanceSpec instance_spec() const;

 private:
  void assign(const std::string& key, const json& value);
  json values_;
};

}  // namespace l0iht::cli
