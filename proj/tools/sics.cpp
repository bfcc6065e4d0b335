// Command-line front end: gen | solve | eval | certify.
//
// Exit codes: 0 success, 1 certificate failed, 2 invalid input or flags,
// 3 solver failure, 4 file IO failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "sics/io.hpp"
#include "sics/sics.hpp"

namespace {

using sics::io::Json;

constexpr int kExitCertFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIO = 4;

std::string meta_path(const std::string& cov_path) { return cov_path + ".meta.json"; }

struct GenFlags {
  std::string kind;
  long long n = 0;
  long long m = 500;
  long long p = 500;
  double noise_sd = 0.1;
  std::uint64_t seed = 0;
  std::string out;
  std::string truth;
};

int run_gen(const GenFlags& f) {
  Json meta;
  meta["generator"] = sics::kGeneratorName;
  meta["kind"] = f.kind;
  meta["n"] = f.n;
  meta["seed"] = f.seed;
  if (f.kind == "gaussian") {
    meta["m"] = f.m;
    const auto sigma = sics::gaussian_covariance(f.n, f.m, f.seed);
    sics::io::write_covariance_csv(f.out, sigma);
    std::cout << f.out << '\n';
  } else {
    meta["p"] = f.p;
    meta["noise_sd"] = f.noise_sd;
    const auto inst = sics::sparse_structured_covariance(f.n, f.p, f.noise_sd, f.seed);
    meta["diagonal_loading"] = inst.diagonal_loading;
    sics::io::write_covariance_csv(f.out, inst.sigma);
    std::cout << f.out << '\n';
    if (!f.truth.empty()) {
      sics::io::write_precision_triplets(f.truth, inst.x_true);
      std::cout << f.truth << '\n';
    }
  }
  sics::io::write_json(meta_path(f.out), meta);
  return 0;
}

struct SolveFlags {
  std::string cov;
  long long sparsity = -1;
  std::string out;
  std::string trace;
  sics::CwoaConfig cfg;
  bool no_swaps = false;
  bool timing = false;
};

int run_solve(SolveFlags f) {
  const auto sigma = sics::io::read_covariance_csv(f.cov);
  if (f.sparsity % 2 != 0)
    std::cerr << "warning: odd sparsity " << f.sparsity << " allows " << f.sparsity / 2
              << " symmetric pairs (" << (f.sparsity / 2) * 2 << " off-diagonal nonzeros)\n";
  for (sics::Index i = 0; i < sigma.size(); ++i)
    if (!(sigma(i, i) > 0.0))
      throw sics::NonPositiveDiagonal("variable " + std::to_string(i + 1) +
                                      " has non-positive variance; drop constant columns");
  f.cfg.sparsity = f.sparsity;
  f.cfg.enable_swaps = !f.no_swaps;

  Json generator = nullptr;
  if (std::filesystem::exists(meta_path(f.cov))) generator = sics::io::read_json(meta_path(f.cov));

  const auto res = sics::solve(sigma, f.cfg);
  if (!f.out.empty()) sics::io::write_precision_triplets(f.out, res.x);
  if (!f.trace.empty())
    sics::io::write_json(f.trace, sics::io::trace_json(res, f.cfg, generator, f.timing));

  Json summary;
  summary["objective"] = res.f;
  summary["nnz_off"] = sics::offdiag_nnz(res.x);
  summary["support_pairs"] = res.state.support.size();
  const double pivot = res.state.l.min_pivot();
  summary["min_pivot_sq"] = pivot * pivot;
  summary["iterations"] = res.trace.records.size();
  summary["wall_ms"] = res.wall_ms;
  Json flags = Json::array();
  if (res.trace.greedy_saturated) flags.push_back("greedy_saturated");
  if (res.trace.swap_limit_reached) flags.push_back("swap_limit_reached");
  summary["flags"] = flags;
  summary["config"] = sics::io::config_json(f.cfg);
  summary["generator"] = generator;
  std::cout << summary.dump() << '\n';
  return 0;
}

struct EvalFlags {
  std::string cov;
  std::string precision;
};

int run_eval(const EvalFlags& f) {
  const auto sigma = sics::io::read_covariance_csv(f.cov);
  const auto x = sics::io::read_precision_triplets(f.precision);
  if (sigma.size() != x.size())
    throw sics::InvalidInput("covariance is " + std::to_string(sigma.size()) +
                             "-dimensional, precision is " + std::to_string(x.size()));
  Json out;
  const auto l = sics::try_cholesky(x);
  out["objective"] = l ? Json(sics::objective(sigma, x, *l)) : Json(nullptr);
  out["nnz_off"] = sics::offdiag_nnz(x);
  out["pd"] = l.has_value();
  std::cout << out.dump() << '\n';
  return 0;
}

struct CertifyFlags {
  std::string cov;
  std::string precision;
  long long sparsity = -1;
  double tol = -1.0;
};

Json family_json(const sics::FamilyCheck& c) {
  Json j;
  j["checked"] = c.checked;
  j["pass"] = c.pass;
  j["worst"] = c.worst;
  j["candidate"] = c.candidate.empty() ? Json(nullptr) : Json(c.candidate);
  return j;
}

int run_certify(const CertifyFlags& f) {
  const auto sigma = sics::io::read_covariance_csv(f.cov);
  const auto x = sics::io::read_precision_triplets(f.precision);
  if (sigma.size() != x.size()) throw sics::InvalidInput("dimension mismatch");
  double tol = f.tol;
  if (tol < 0.0) {
    const auto l = sics::try_cholesky(x);
    if (!l) throw sics::InvalidInput("precision matrix is not positive definite");
    tol = 1e-7 * (1.0 + std::abs(sics::objective(sigma, x, *l)));
  }
  const auto rep = sics::certify(sigma, x, f.sparsity, tol);
  Json out;
  out["pass"] = rep.pass();
  out["objective"] = rep.objective;
  out["support_pairs"] = rep.support_pairs;
  out["tol"] = rep.tol;
  out["stationarity"] = family_json(rep.stationarity);
  out["addition"] = family_json(rep.addition);
  out["swap"] = family_json(rep.swap);
  std::cout << out.dump(2) << '\n';
  return rep.pass() ? 0 : kExitCertFailed;
}

void add_newton_flags(CLI::App* cmd, sics::CwoaConfig& cfg) {
  cmd->add_option("--t-in", cfg.newton.t_in, "CG iterations per Newton direction")
      ->capture_default_str();
  cmd->add_option("--eta", cfg.newton.eta, "backtracking ratio")->capture_default_str();
  cmd->add_option("--omega", cfg.newton.omega, "sufficient-decrease constant")
      ->capture_default_str();
  cmd->add_option("--grad-tol", cfg.newton.grad_tol, "restricted gradient tolerance")
      ->capture_default_str();
  cmd->add_option("--max-newton-iters", cfg.newton.t_out, "Newton iterations per subproblem")
      ->capture_default_str();
  cmd->add_option("--refresh-every", cfg.refresh_every, "rank-2 updates between inverse refreshes")
      ->capture_default_str();
  cmd->add_option("--max-swaps", cfg.max_swap_sweeps, "cap on accepted swaps (default 10 n)");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse inverse covariance selection under an off-diagonal l0 budget", "sics"};
  app.require_subcommand(1);

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic covariance matrix");
  gen_cmd->add_option("kind", gen.kind, "gaussian | sparse-struct")
      ->required()
      ->check(CLI::IsMember({"gaussian", "sparse-struct"}));
  gen_cmd->add_option("--n", gen.n, "dimension")->required()->check(CLI::Range(2LL, 100000LL));
  gen_cmd->add_option("--m", gen.m, "samples (gaussian)")->capture_default_str();
  gen_cmd->add_option("--p", gen.p, "planted off-diagonal nonzeros (sparse-struct)")
      ->capture_default_str();
  gen_cmd->add_option("--noise-sd", gen.noise_sd, "noise scale (sparse-struct)")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "generator seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "covariance CSV to write")->required();
  gen_cmd->add_option("--truth", gen.truth, "ground-truth precision triplets (sparse-struct)");

  SolveFlags solve;
  auto* solve_cmd = app.add_subcommand("solve", "estimate a sparse precision matrix");
  solve_cmd->add_option("--cov", solve.cov, "covariance CSV")->required();
  solve_cmd->add_option("--sparsity", solve.sparsity, "budget on off-diagonal nonzeros")
      ->required()
      ->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--out", solve.out, "precision triplets to write");
  solve_cmd->add_option("--trace", solve.trace, "run trace JSON to write");
  add_newton_flags(solve_cmd, solve.cfg);
  solve_cmd->add_flag("--no-swaps", solve.no_swaps, "greedy stage only");
  solve_cmd->add_flag("--timing", solve.timing, "record wall-clock times in the trace");
  solve_cmd->add_option("--seed", "accepted for symmetry with gen; the solver is deterministic");

  EvalFlags eval;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate the objective of a precision matrix");
  eval_cmd->add_option("--cov", eval.cov, "covariance CSV")->required();
  eval_cmd->add_option("--precision", eval.precision, "precision triplets")->required();

  CertifyFlags cert;
  auto* cert_cmd = app.add_subcommand("certify", "check coordinate-wise minimality");
  cert_cmd->add_option("--cov", cert.cov, "covariance CSV")->required();
  cert_cmd->add_option("--precision", cert.precision, "precision triplets")->required();
  cert_cmd->add_option("--sparsity", cert.sparsity, "budget on off-diagonal nonzeros")
      ->required()
      ->check(CLI::NonNegativeNumber);
  cert_cmd->add_option("--tol", cert.tol, "tolerance (default 1e-7 (1 + |f|))");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "InvalidFlags: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return kExitInput;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*solve_cmd) return run_solve(solve);
    if (*eval_cmd) return run_eval(eval);
    if (*cert_cmd) return run_certify(cert);
  } catch (const sics::IOError& e) {
    std::cerr << e.name() << ": " << e.what() << '\n';
    return kExitIO;
  } catch (const sics::InvalidInput& e) {
    std::cerr << e.name() << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const sics::NonPositiveDiagonal& e) {
    std::cerr << e.name() << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const sics::SolverError& e) {
    std::cerr << e.name() << ": " << e.what() << '\n';
    return kExitSolver;
  }
  return 0;
}
