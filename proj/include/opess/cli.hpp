#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opess/models.hpp"

namespace opess {

// Synthetic-data request inside a config: draw n observations from the
// model at the given generating parameters.
struct SimulateSpec {
  long n = 0;
  std::vector<double> theta;
  std::uint64_t data_seed = 0;
};

// A full compute run parsed from JSON. Exactly one of values, file, and
// simulate is set. L = 0 means the model's default chain cap.
struct RunConfig {
  ModelSpec model;
  std::optional<std::vector<double>> values;
  std::optional<std::vector<std::pair<double, double>>> pairs;
  std::optional<std::string> file;
  std::optional<SimulateSpec> simulate;
  long L = 0;
  long S = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out_path;
};

// Parse config JSON text. Unknown keys and constraint violations raise
// ValidationError with the offending key named.
RunConfig parse_config(const std::string& text);

// Canonical JSON (sorted keys) for the config; equal configs serialize
// identically, and parse(serialize(c)) round-trips.
std::string serialize_config(const RunConfig& cfg);

// Materialize the configured dataset: inline values, a file read, or a
// simulation.
Dataset resolve_dataset(const RunConfig& cfg);

// Entry point used by both main() and in-process tests. Returns the
// process exit code: 0 success, 1 usage, 2 validation, 3 I/O.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace opess
