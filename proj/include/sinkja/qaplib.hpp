#ifndef SINKJA_QAPLIB_HPP
#define SINKJA_QAPLIB_HPP

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinkja/qap.hpp"

namespace sinkja {

struct QaplibProblem {
  std::string name;
  int n = 0;
  std::vector<double> A;  // flow
  std::vector<double> B;  // distance

  QapInstance to_instance() const {
    return QapInstance::koopmans_beckmann(n, A, B, name);
  }
};

struct QaplibSolution {
  int n = 0;
  double value = 0.0;
  Assignment perm;  // 0-based internally; files carry 1-based images
};

namespace detail {

inline std::vector<double> read_tokens(std::istream& in, const char* what) {
  std::vector<double> tok;
  double v;
  while (in >> v) tok.push_back(v);
  if (!in.eof()) {
    std::string bad;
    in.clear();
    in >> bad;
    throw std::runtime_error(std::string(what) + ": malformed token '" + bad + "'");
  }
  return tok;
}

inline int as_dim(double v, const char* what) {
  const int n = static_cast<int>(v);
  if (v != n || n < 1)
    throw std::runtime_error(std::string(what) + ": bad dimension");
  return n;
}

}  // namespace detail

// QAPLIB .dat: first token n, then n x n flow matrix A, then n x n distance
// matrix B, whitespace-separated with arbitrary line breaks.
inline QaplibProblem parse_dat(std::istream& in, std::string name = "") {
  const auto tok = detail::read_tokens(in, "parse_dat");
  if (tok.empty()) throw std::runtime_error("parse_dat: empty input");
  const int n = detail::as_dim(tok[0], "parse_dat");
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  if (tok.size() != 1 + 2 * nn)
    throw std::runtime_error("parse_dat: token count " + std::to_string(tok.size()) +
                             ", expected " + std::to_string(1 + 2 * nn));
  QaplibProblem p;
  p.name = std::move(name);
  p.n = n;
  p.A.assign(tok.begin() + 1, tok.begin() + 1 + nn);
  p.B.assign(tok.begin() + 1 + nn, tok.end());
  return p;
}

inline QaplibProblem parse_dat(const std::string& text, std::string name = "") {
  std::istringstream in(text);
  return parse_dat(in, std::move(name));
}

// QAPLIB .sln: "n value" followed by a permutation of 1..n.
inline QaplibSolution parse_sln(std::istream& in) {
  const auto tok = detail::read_tokens(in, "parse_sln");
  if (tok.size() < 2) throw std::runtime_error("parse_sln: missing header");
  QaplibSolution s;
  s.n = detail::as_dim(tok[0], "parse_sln");
  s.value = tok[1];
  if (tok.size() != 2 + static_cast<std::size_t>(s.n))
    throw std::runtime_error("parse_sln: token count mismatch");
  s.perm.perm.resize(s.n);
  for (int i = 0; i < s.n; ++i) {
    const double v = tok[2 + i];
    if (v != static_cast<int>(v))
      throw std::runtime_error("parse_sln: non-integer permutation entry");
    s.perm.perm[i] = static_cast<int>(v) - 1;
  }
  if (!s.perm.valid()) throw std::runtime_error("parse_sln: not a permutation");
  return s;
}

inline QaplibSolution parse_sln(const std::string& text) {
  std::istringstream in(text);
  return parse_sln(in);
}

inline std::string serialize_dat(const QaplibProblem& p) {
  std::ostringstream out;
  out << p.n << "\n\n";
  auto emit = [&](const std::vector<double>& m) {
    for (int i = 0; i < p.n; ++i) {
      for (int j = 0; j < p.n; ++j) {
        if (j) out << ' ';
        const double v = m[static_cast<std::size_t>(i) * p.n + j];
        if (v == static_cast<long long>(v))
          out << static_cast<long long>(v);
        else
          out << v;
      }
      out << '\n';
    }
    out << '\n';
  };
  emit(p.A);
  emit(p.B);
  return out.str();
}

inline QaplibProblem load_dat_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_dat(in, path.stem().string());
}

inline QaplibSolution load_sln_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_sln(in);
}

// Benchmark data directory: $SINKJA_DATA_DIR when set, otherwise data/qaplib
// relative to the working directory.
inline std::filesystem::path data_dir() {
  if (const char* env = std::getenv("SINKJA_DATA_DIR")) return env;
  return "data/qaplib";
}

// Instances excluded from exact .sln cross-checks, one name per line;
// '#' starts a comment.
inline std::vector<std::string> load_skip_manifest(
    const std::filesystem::path& dir) {
  std::vector<std::string> names;
  std::ifstream in(dir / "skip.txt");
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string name;
    if (ls >> name) names.push_back(name);
  }
  return names;
}

struct ResultRow {
  std::string instance;
  int n = 0;
  std::string method;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> bk_lower;
  std::optional<double> bk_upper;
  double gap = 0.0;
  int outer_iters = 0;
  long inner_cycles = 0;
  double wall_ms = 0.0;
};

inline constexpr const char* csv_header =
    "instance,n,method,lower,upper,bk_lower,bk_upper,gap,outer_iters,"
    "inner_cycles,wall_ms";

namespace detail {

inline std::string num6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

// Header plus one line per row; absent best-known bounds stay empty cells.
inline void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << csv_header << '\n';
  for (const auto& r : rows) {
    out << r.instance << ',' << r.n << ',' << r.method << ','
        << detail::num6(r.lower) << ',' << detail::num6(r.upper) << ','
        << (r.bk_lower ? detail::num6(*r.bk_lower) : "") << ','
        << (r.bk_upper ? detail::num6(*r.bk_upper) : "") << ','
        << detail::num6(r.gap) << ',' << r.outer_iters << ',' << r.inner_cycles
        << ',' << detail::num6(r.wall_ms) << '\n';
  }
}

inline void write_csv(const std::vector<ResultRow>& rows,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(rows, out);
}

}  // namespace sinkja

#endif
