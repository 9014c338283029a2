#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "opess/engine.hpp"
#include "opess/harness.hpp"

namespace opess {

// Configuration or data that fails a stated constraint.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failure: unreadable input, unwritable output.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse a dataset file for the given family. One observation per line
// ("x,y" pairs for regression), '#' starts a comment, blank lines are
// skipped. Errors carry "path:line: message".
Dataset read_dataset(const std::string& path, Family family);

// Shortest decimal form with 12 significant digits.
std::string format_sig12(double x);

// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

// ISO 8601 UTC timestamp, honoring SOURCE_DATE_EPOCH when set.
std::string timestamp_utc();

// Write text to path via a temporary file and rename.
void atomic_write_text(const std::string& path, const std::string& text);

struct Provenance {
  std::string version;
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;
  std::string created_utc;
};

// Summary CSV at path, pmf CSV at "<stem>_pmf.csv", metadata JSON at
// "<path>.meta.json".
void write_opess_result(const OpessResult& result, const std::string& path,
                        const Provenance& prov);

void write_study_rows(const std::vector<StudyRow>& rows,
                      const std::string& path,
                      const std::vector<std::string>& extra_names);

void write_binned(const std::vector<BinRow>& rows, const std::string& path);

void write_histogram(const std::vector<HistRow>& rows,
                     const std::string& path);

void write_meta(const std::string& path, const Provenance& prov, long n,
                long L, long S);

}  // namespace opess
