#ifndef SICS_IO_HPP
#define SICS_IO_HPP

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "sics/cwoa.hpp"
#include "sics/matrix.hpp"

namespace sics::io {

using Json = nlohmann::ordered_json;

/// 17 significant digits, enough for strtod to recover the same double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& tok, const std::string& where) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE)
    throw InvalidInput(where + ": cannot parse number '" + tok + "'");
  return v;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError("cannot open '" + path + "' for writing");
  return out;
}

/**
 * Reads an n x n comma-separated matrix without header. Blank lines are
 * ignored. The result is the symmetric part of the file contents; a warning is
 * written to `warn` when the asymmetry exceeds 1e-8.
 */
inline SymMatrix parse_covariance_csv(std::istream& in, std::ostream* warn = &std::cerr,
                                      const std::string& name = "covariance") {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ','))
      row.push_back(parse_double(trim(tok), name + ":" + std::to_string(lineno)));
    rows.push_back(std::move(row));
  }
  const Index n = static_cast<Index>(rows.size());
  if (n == 0) throw InvalidInput(name + ": empty matrix");
  Dense a(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != n)
      throw InvalidInput(name + ": row " + std::to_string(i + 1) + " has " +
                         std::to_string(row.size()) + " values, expected " + std::to_string(n));
    for (Index j = 0; j < n; ++j) a(i, j) = row[static_cast<std::size_t>(j)];
  }
  if (!a.allFinite()) throw InvalidInput(name + ": non-finite values");
  const double asym = max_abs(Dense(a - a.transpose()));
  if (asym > 1e-8 && warn)
    *warn << "warning: " << name << " is asymmetric by " << asym << "; using its symmetric part\n";
  return SymMatrix::symmetrized(a);
}

inline SymMatrix read_covariance_csv(const std::string& path, std::ostream* warn = &std::cerr) {
  auto in = open_in(path);
  return parse_covariance_csv(in, warn, path);
}

inline void write_covariance_csv(std::ostream& out, const SymMatrix& m) {
  for (Index i = 0; i < m.size(); ++i) {
    for (Index j = 0; j < m.size(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

inline void write_covariance_csv(const std::string& path, const SymMatrix& m) {
  auto out = open_out(path);
  write_covariance_csv(out, m);
  if (!out) throw IOError("failed writing '" + path + "'");
}

/// Header "n nnz_upper", then "i j value" (1-based, i <= j) for every nonzero
/// of the upper triangle including the diagonal, in column-major order.
inline void write_precision_triplets(std::ostream& out, const SymMatrix& x) {
  const Index n = x.size();
  Index nnz = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i)
      if (x(i, j) != 0.0) ++nnz;
  out << n << ' ' << nnz << '\n';
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i)
      if (x(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << format_double(x(i, j)) << '\n';
}

inline void write_precision_triplets(const std::string& path, const SymMatrix& x) {
  auto out = open_out(path);
  write_precision_triplets(out, x);
  if (!out) throw IOError("failed writing '" + path + "'");
}

inline SymMatrix parse_precision_triplets(std::istream& in, const std::string& name = "precision") {
  std::string line;
  auto next_line = [&](std::string& dst) {
    while (std::getline(in, dst))
      if (!trim(dst).empty()) return true;
    return false;
  };
  if (!next_line(line)) throw InvalidInput(name + ": missing header");
  long long n = 0, nnz = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> n >> nnz) || (hs >> extra) || n < 1 || nnz < 0)
      throw InvalidInput(name + ": header must be 'n nnz_upper'");
  }
  SymMatrix x(static_cast<Index>(n));
  std::vector<unsigned char> seen(static_cast<std::size_t>(n * n), 0);
  for (long long k = 0; k < nnz; ++k) {
    if (!next_line(line))
      throw InvalidInput(name + ": expected " + std::to_string(nnz) + " entries, found " +
                         std::to_string(k));
    std::istringstream ls(line);
    long long i = 0, j = 0;
    std::string val, extra;
    if (!(ls >> i >> j >> val) || (ls >> extra))
      throw InvalidInput(name + ": malformed entry '" + trim(line) + "'");
    if (i < 1 || j < i || j > n)
      throw InvalidInput(name + ": entry (" + std::to_string(i) + "," + std::to_string(j) +
                         ") is outside the upper triangle");
    auto& flag = seen[static_cast<std::size_t>((j - 1) * n + (i - 1))];
    if (flag) throw InvalidInput(name + ": duplicate entry (" + std::to_string(i) + "," +
                                 std::to_string(j) + ")");
    flag = 1;
    const double v = parse_double(val, name);
    if (!std::isfinite(v)) throw InvalidInput(name + ": non-finite value");
    x.set(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
  }
  if (next_line(line)) throw InvalidInput(name + ": more entries than the header declares");
  return x;
}

inline SymMatrix read_precision_triplets(const std::string& path) {
  auto in = open_in(path);
  return parse_precision_triplets(in, path);
}

inline Json coord_json(const std::optional<Coord>& j) {
  if (!j) return nullptr;
  return Json::array({j->r + 1, j->c + 1});
}

inline Json config_json(const CwoaConfig& cfg) {
  Json c;
  c["sparsity"] = cfg.sparsity;
  c["capacity_pairs"] = cfg.capacity();
  c["t_in"] = cfg.newton.t_in;
  c["max_newton_iters"] = cfg.newton.t_out;
  c["eta"] = cfg.newton.eta;
  c["omega"] = cfg.newton.omega;
  c["grad_tol"] = cfg.newton.grad_tol;
  c["max_backtracks"] = cfg.newton.max_backtracks;
  c["refresh_every"] = cfg.refresh_every;
  c["max_swap_sweeps"] = cfg.max_swap_sweeps;
  c["tol_improve"] = cfg.tol_improve;
  c["swaps"] = cfg.enable_swaps;
  return c;
}

/**
 * Run trace document: {"config", "generator", "iterations", "final"}.
 * Timing fields are null unless `with_timing`, so identical runs produce
 * identical bytes.
 */
inline Json trace_json(const SolveResult& res, const CwoaConfig& cfg, const Json& generator,
                       bool with_timing) {
  Json doc;
  doc["config"] = config_json(cfg);
  doc["generator"] = generator;
  Json iters = Json::array();
  for (const auto& r : res.trace.records) {
    Json it;
    it["iter"] = r.iter;
    it["stage"] = to_string(r.stage);
    it["added"] = coord_json(r.added);
    it["dropped"] = coord_json(r.dropped);
    it["theta"] = r.theta;
    it["objective"] = r.objective;
    it["support_pairs"] = r.support_pairs;
    it["newton_iters"] = r.newton_iters;
    it["nnz_off"] = r.nnz_off;
    it["min_pivot"] = r.min_pivot;
    it["elapsed_ms"] = with_timing ? Json(r.elapsed_ms) : Json(nullptr);
    iters.push_back(std::move(it));
  }
  doc["iterations"] = std::move(iters);
  Json fin;
  fin["objective"] = res.f;
  Json support = Json::array();
  for (const auto& j : res.state.support) support.push_back(Json::array({j.r + 1, j.c + 1}));
  fin["support"] = std::move(support);
  fin["wall_ms"] = with_timing ? Json(res.wall_ms) : Json(nullptr);
  Json flags = Json::array();
  if (res.trace.greedy_saturated) flags.push_back("greedy_saturated");
  if (res.trace.swap_limit_reached) flags.push_back("swap_limit_reached");
  fin["flags"] = std::move(flags);
  fin["skipped_drops"] = res.trace.skipped_drops;
  fin["branch_flips"] = res.trace.branch_flips;
  fin["newton_unconverged"] = res.trace.newton_unconverged;
  doc["final"] = std::move(fin);
  return doc;
}

inline void write_json(const std::string& path, const Json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IOError("failed writing '" + path + "'");
}

inline Json read_json(const std::string& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

} // namespace sics::io

#endif // SICS_IO_HPP
