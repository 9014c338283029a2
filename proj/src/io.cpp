#include "opess/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace opess {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const auto lo = s.find_first_not_of(ws);
  if (lo == std::string::npos) return "";
  const auto hi = s.find_last_not_of(ws);
  return s.substr(lo, hi - lo + 1);
}

[[noreturn]] void line_error(const std::string& path, long line_no,
                             const std::string& message) {
  throw ValidationError(path + ":" + std::to_string(line_no) + ": " + message);
}

double parse_number(const std::string& token, const std::string& path,
                    long line_no) {
  const std::string t = trim(token);
  if (t.empty()) line_error(path, line_no, "expected a number");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE) {
    line_error(path, line_no, "expected a number, got '" + t + "'");
  }
  return v;
}

}  // namespace

Dataset read_dataset(const std::string& path, Family family) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);

  std::vector<double> values;
  std::vector<std::pair<double, double>> pairs;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (family == Family::regression) {
      const auto comma = line.find(',');
      if (comma == std::string::npos ||
          line.find(',', comma + 1) != std::string::npos) {
        line_error(path, line_no, "expected 'x,y'");
      }
      const double x = parse_number(line.substr(0, comma), path, line_no);
      const double y = parse_number(line.substr(comma + 1), path, line_no);
      pairs.emplace_back(x, y);
    } else {
      const double v = parse_number(line, path, line_no);
      if (family == Family::bernoulli && v != 0.0 && v != 1.0) {
        line_error(path, line_no, "observation must be 0 or 1");
      }
      values.push_back(v);
    }
  }
  if (in.bad()) throw IoError("read failure on dataset file: " + path);

  if (family == Family::regression) {
    return RegressionData::from_pairs(std::move(pairs));
  }
  return ScalarData::from_values(std::move(values));
}

std::string format_sig12(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string timestamp_utc() {
  std::time_t t = std::time(nullptr);
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
    errno = 0;
    char* end = nullptr;
    const long long pinned = std::strtoll(sde, &end, 10);
    if (end != sde && *end == '\0' && errno != ERANGE) {
      t = static_cast<std::time_t>(pinned);
    }
  }
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void atomic_write_text(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + tmp);
    out << text;
    out.flush();
    if (!out) throw IoError("write failure on file: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot move " + tmp + " to " + path + ": " +
                  std::strerror(errno));
  }
}

namespace {

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(digest));
  return buf;
}

std::string csv_stem(const std::string& path) {
  const std::string suffix = ".csv";
  if (path.size() > suffix.size() &&
      path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return path.substr(0, path.size() - suffix.size());
  }
  return path;
}

}  // namespace

void write_opess_result(const OpessResult& result, const std::string& path,
                        const Provenance& prov) {
  std::ostringstream summary;
  summary << "mopess,q05,q50,q95,mean_min_distance,boundary_fraction,"
             "n,L,S,seed\n";
  summary << format_sig12(result.mopess) << ','
          << format_sig12(result.quantiles.at(0.05)) << ','
          << format_sig12(result.quantiles.at(0.5)) << ','
          << format_sig12(result.quantiles.at(0.95)) << ','
          << format_sig12(result.mean_min_distance) << ','
          << format_sig12(result.boundary_fraction) << ',' << result.n << ','
          << result.L << ',' << result.S << ',' << result.seed << '\n';
  atomic_write_text(path, summary.str());

  std::ostringstream pmf;
  pmf << "m_n,count,frequency\n";
  for (const auto& [v, c] : result.counts) {
    const double f = static_cast<double>(c) / static_cast<double>(result.S);
    pmf << v << ',' << c << ',' << format_sig12(f) << '\n';
  }
  atomic_write_text(csv_stem(path) + "_pmf.csv", pmf.str());

  write_meta(path + ".meta.json", prov, result.n, result.L, result.S);
}

void write_study_rows(const std::vector<StudyRow>& rows,
                      const std::string& path,
                      const std::vector<std::string>& extra_names) {
  std::ostringstream out;
  out << "dataset_id,xstat,mopess,q05,q50,q95,mean_min_distance,"
         "boundary_fraction";
  for (const std::string& name : extra_names) out << ',' << name;
  out << '\n';
  for (const StudyRow& r : rows) {
    out << r.dataset_id << ',' << format_sig12(r.xstat) << ','
        << format_sig12(r.mopess) << ',' << format_sig12(r.q05) << ','
        << format_sig12(r.q50) << ',' << format_sig12(r.q95) << ','
        << format_sig12(r.mean_min_distance) << ','
        << format_sig12(r.boundary_fraction);
    const std::optional<double> extras[] = {r.extra1, r.extra2};
    for (std::size_t i = 0; i < extra_names.size(); ++i) {
      out << ',' << format_sig12(i < 2 && extras[i] ? *extras[i] : 0.0);
    }
    out << '\n';
  }
  atomic_write_text(path, out.str());
}

void write_binned(const std::vector<BinRow>& rows, const std::string& path) {
  std::ostringstream out;
  out << "bin,x_lo,x_hi,x_mean,mopess_mean,q05,q50,q95,count\n";
  long index = 0;
  for (const BinRow& r : rows) {
    out << index++ << ',' << format_sig12(r.x_lo) << ','
        << format_sig12(r.x_hi) << ',' << format_sig12(r.x_mean) << ','
        << format_sig12(r.mopess_mean) << ',' << format_sig12(r.q05) << ','
        << format_sig12(r.q50) << ',' << format_sig12(r.q95) << ',' << r.count
        << '\n';
  }
  atomic_write_text(path, out.str());
}

void write_histogram(const std::vector<HistRow>& rows,
                     const std::string& path) {
  const bool with_theory = !rows.empty() && rows.front().theory_pmf.has_value();
  std::ostringstream out;
  out << "m_n,count,frequency";
  if (with_theory) out << ",theory_pmf";
  out << '\n';
  for (const HistRow& r : rows) {
    out << r.m_n << ',' << r.count << ',' << format_sig12(r.frequency);
    if (with_theory) out << ',' << format_sig12(r.theory_pmf.value_or(0.0));
    out << '\n';
  }
  atomic_write_text(path, out.str());
}

void write_meta(const std::string& path, const Provenance& prov, long n,
                long L, long S) {
  nlohmann::json j;
  j["version"] = prov.version;
  j["seed"] = prov.seed;
  j["config_digest"] = digest_hex(prov.config_digest);
  j["created_utc"] = prov.created_utc;
  j["n"] = n;
  j["L"] = L;
  j["S"] = S;
  atomic_write_text(path, j.dump(2) + "\n");
}

}  // namespace opess
