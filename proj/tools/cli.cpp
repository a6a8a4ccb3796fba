#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "sstep/diagnostics.hpp"
#include "sstep/gmres.hpp"
#include "sstep/numfmt.hpp"
#include "sstep/sparse.hpp"

namespace sstep::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RandSvdSpec parse_randsvd(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) parts.push_back(tok);
  if (parts.size() != 4) throw UsageError("--randsvd expects n,kappa,mode,seed");
  RandSvdSpec spec;
  try {
    spec.n = std::stoull(parts[0]);
    spec.kappa = parse_double(parts[1]);
    spec.mode = std::stoi(parts[2]);
    spec.seed = std::stoull(parts[3]);
  } catch (const std::exception&) {
    throw UsageError("--randsvd: cannot parse '" + text + "'");
  }
  if (spec.n == 0) throw UsageError("--randsvd: n must be positive");
  if (!(spec.kappa >= 1.0)) throw UsageError("--randsvd: kappa must be >= 1");
  if (spec.mode < 1 || spec.mode > 5) throw UsageError("--randsvd: mode must be 1..5");
  return spec;
}

Vector read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  Vector v;
  std::string tok;
  while (in >> tok) {
    if (tok.front() == '%' || tok.front() == '#') {
      std::getline(in, tok);
      continue;
    }
    try {
      v.push_back(parse_double(tok));
    } catch (const std::invalid_argument& e) {
      throw UsageError(path + ": " + e.what());
    }
  }
  return v;
}

struct Problem {
  CsrMatrix a;
  std::optional<RandSvdProblem> randsvd;
};

Problem load_problem(const std::string& matrix_path, const std::string& randsvd) {
  Problem p;
  if (!matrix_path.empty()) {
    try {
      p.a = read_matrix_market_file(matrix_path);
    } catch (const MatrixMarketError& e) {
      throw UsageError(matrix_path + ": " + e.what());
    } catch (const std::runtime_error& e) {
      throw UsageError(e.what());
    }
  } else {
    p.randsvd = gen_randsvd(parse_randsvd(randsvd));
    p.a = CsrMatrix::from_dense(p.randsvd->a);
  }
  return p;
}

Vector make_rhs(const Problem& p, const std::string& rhs) {
  const std::size_t n = p.a.n();
  if (rhs == "ones") return Vector(n, 1.0);
  if (rhs.rfind("file:", 0) == 0) {
    Vector b = read_vector_file(rhs.substr(5));
    if (b.size() != n)
      throw UsageError("rhs file has " + std::to_string(b.size()) + " entries, matrix has n = " + std::to_string(n));
    return b;
  }
  if (rhs.rfind("rsv:", 0) == 0) {
    if (!p.randsvd) throw UsageError("--rhs rsv:k needs --randsvd");
    std::size_t k = 0;
    try {
      k = std::stoull(rhs.substr(4));
    } catch (const std::exception&) {
      throw UsageError("--rhs: cannot parse '" + rhs + "'");
    }
    if (k < 1 || k > n) throw UsageError("--rhs rsv:k needs 1 <= k <= n");
    return right_singular_vector(p.randsvd->v, k);
  }
  throw UsageError("--rhs must be ones, file:PATH or rsv:k");
}

struct SolveOptions {
  std::string matrix;
  std::string randsvd;
  std::string rhs = "ones";
  std::size_t s = 1;
  std::string basis = "monomial";
  std::string arnoldi = "classical";
  std::string orth = "bcgsi+";
  std::optional<double> tol, tolh, tolls;
  std::optional<std::size_t> restart, max_outer;
  std::string precond = "none";
  std::string precond_side = "right";
  std::string basis_operator = "plain";
  bool no_hstop = false;
  std::size_t diag_every = 1;
  std::string csv;
  bool summary = false;
};

void add_problem_source(CLI::App& app, std::string& matrix, std::string& randsvd) {
  auto* m = app.add_option("--matrix", matrix, "Matrix Market file (coordinate real general|symmetric)");
  auto* r = app.add_option("--randsvd", randsvd, "Generate randsvd matrix: n,kappa,mode,seed");
  m->excludes(r);
  r->excludes(m);
}

void configure_solve(CLI::App& app, SolveOptions& o) {
  app.description("Run s-step GMRES (x0 = 0)");
  add_problem_source(app, o.matrix, o.randsvd);
  app.add_option("--rhs", o.rhs, "Right-hand side: ones | file:PATH | rsv:k (k-th right singular vector)")
      ->capture_default_str();
  app.add_option("--s", o.s, "Block size s")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--basis", o.basis, "Polynomial basis")
      ->check(CLI::IsMember({"monomial", "newton", "chebyshev"}))
      ->capture_default_str();
  app.add_option("--arnoldi", o.arnoldi, "Arnoldi variant")
      ->check(CLI::IsMember({"classical", "modified"}))
      ->capture_default_str();
  app.add_option("--orth", o.orth, "Block orthogonalization")
      ->check(CLI::IsMember({"bcgsi+", "bmgs"}))
      ->capture_default_str();
  app.add_option("--tol", o.tol, "Backward-error tolerance (default n*u)")->check(CLI::PositiveNumber);
  app.add_option("--tolh", o.tolh, "Key-dimension tolerance (default sqrt(n)*u)")->check(CLI::PositiveNumber);
  app.add_option("--tolls", o.tolls, "Least-squares residual tolerance (default tol)")->check(CLI::PositiveNumber);
  app.add_flag("--no-hstop", o.no_hstop, "Disable the key-dimension stopping test");
  app.add_option("--restart", o.restart, "Restart after this many Krylov columns")->check(CLI::PositiveNumber);
  app.add_option("--max-outer", o.max_outer,
                 "Block-step cap (default ceil(n/s)); restart-cycle cap with --restart (default 10)")
      ->check(CLI::PositiveNumber);
  app.add_option("--precond", o.precond, "Preconditioner")
      ->check(CLI::IsMember({"none", "jacobi"}))
      ->capture_default_str();
  app.add_option("--precond-side", o.precond_side, "Side the preconditioner is applied on")
      ->check(CLI::IsMember({"left", "right"}))
      ->capture_default_str();
  app.add_option("--basis-operator", o.basis_operator, "Operator inside the basis polynomials")
      ->check(CLI::IsMember({"plain", "preconditioned"}))
      ->capture_default_str();
  app.add_option("--diag-every", o.diag_every, "Conditioning diagnostics every k block steps (0 = off)")
      ->capture_default_str();
  app.add_option("--csv", o.csv, "Write per-step diagnostics CSV to PATH ('-' for stdout)");
  app.add_flag("--summary", o.summary, "Print a summary after the solve");
}

struct GenOptions {
  std::string randsvd;
  std::string out;
};

void configure_gen(CLI::App& app, GenOptions& o) {
  app.description("Write a randsvd matrix as Matrix Market plus a singular-value sidecar");
  app.add_option("--randsvd", o.randsvd, "n,kappa,mode,seed")->required();
  app.add_option("--out", o.out, "Output Matrix Market path")->required();
}

struct InfoOptions {
  std::string matrix;
};

inline constexpr std::size_t info_dense_limit = 2000;

void configure_info(CLI::App& app, InfoOptions& o) {
  app.description("Print n, nnz, symmetry, Frobenius norm and 2-norm condition number");
  app.add_option("--matrix", o.matrix, "Matrix Market file")->required();
}

SolverConfig to_config(const SolveOptions& o) {
  SolverConfig cfg;
  cfg.s = o.s;
  cfg.basis = basis_family_from_string(o.basis);
  cfg.variant = arnoldi_variant_from_string(o.arnoldi);
  cfg.scheme = ortho_scheme_from_string(o.orth);
  cfg.tol = o.tol;
  cfg.tol_h = o.tolh;
  cfg.tol_ls = o.tolls;
  cfg.key_dimension_stop = !o.no_hstop;
  cfg.restart = o.restart;
  cfg.max_outer = o.max_outer;
  cfg.precond = o.precond == "jacobi" ? PreconditionerChoice::jacobi : PreconditionerChoice::none;
  cfg.precond_side = o.precond_side == "left" ? PreconditionerSide::left : PreconditionerSide::right;
  cfg.basis_operator = o.basis_operator == "preconditioned" ? BasisOperator::preconditioned : BasisOperator::plain;
  cfg.diag_every = o.diag_every;
  return cfg;
}

/// Parses args with CLI11; returns an exit code if parsing ended the command.
std::optional<int> parse_app(CLI::App& app, const std::vector<std::string>& args, std::ostream& out,
                             std::ostream& err) {
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return exit_usage;
  }
  return std::nullopt;
}

double max_cond_b_tilde(const std::vector<IterationRecord>& records) {
  double m = missing_value;
  for (const auto& r : records)
    if (!is_missing(r.cond_B_tilde) && (is_missing(m) || r.cond_B_tilde > m)) m = r.cond_B_tilde;
  return m;
}

std::string fmt(double v) { return is_missing(v) ? "n/a" : format_shortest(v); }

int solve_command(const SolveOptions& o, std::ostream& out) {
  if (o.matrix.empty() == o.randsvd.empty()) throw UsageError("exactly one of --matrix or --randsvd is required");
  const Problem p = load_problem(o.matrix, o.randsvd);
  const Vector b = make_rhs(p, o.rhs);
  const std::size_t n = p.a.n();
  if (o.s > n) throw UsageError("--s must not exceed n = " + std::to_string(n));
  if (o.restart && (*o.restart < o.s || *o.restart > n))
    throw UsageError("--restart must lie between s and n = " + std::to_string(n));

  const SolverConfig cfg = to_config(o);
  const Vector x0(n, 0.0);
  SolveResult res;
  try {
    res = solve(p.a, b, x0, cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  if (!o.csv.empty()) {
    if (o.csv == "-") {
      write_csv(res.records, out);
    } else {
      std::ofstream f(o.csv);
      if (!f) throw UsageError("cannot write '" + o.csv + "'");
      write_csv(res.records, f);
    }
  }
  if (o.summary) {
    out << "status: " << to_string(res.status) << '\n'
        << "final_backward_error: " << fmt(res.final_backward_error) << '\n'
        << "tol: " << fmt(res.tol) << '\n'
        << "outer_iterations: " << res.outer_iterations << '\n'
        << "restart_cycles: " << res.restart_cycles << '\n'
        << "max_cond_B_tilde: " << fmt(max_cond_b_tilde(res.records)) << '\n';
  }
  const bool ok = res.status == SolveStatus::converged_backward || res.status == SolveStatus::converged_ls ||
                  res.final_backward_error <= res.tol;
  return ok ? exit_ok : exit_not_converged;
}

int gen_command(const GenOptions& o, std::ostream& out) {
  const RandSvdProblem p = gen_randsvd(parse_randsvd(o.randsvd));
  {
    std::ofstream f(o.out);
    if (!f) throw UsageError("cannot write '" + o.out + "'");
    write_matrix_market(f, CsrMatrix::from_dense(p.a));
    if (!f) throw std::runtime_error("write failed: " + o.out);
  }
  const std::string side = sigma_sidecar_path(o.out);
  std::ofstream f(side);
  if (!f) throw UsageError("cannot write '" + side + "'");
  for (double s : p.sigma) f << format_shortest(s) << '\n';
  if (!f) throw std::runtime_error("write failed: " + side);
  out << "wrote " << o.out << " and " << side << '\n';
  return exit_ok;
}

int info_command(const InfoOptions& o, std::ostream& out, std::ostream& err) {
  MatrixMarketInfo mm;
  CsrMatrix a;
  try {
    a = read_matrix_market_file(o.matrix, &mm);
  } catch (const std::runtime_error& e) {
    throw UsageError(o.matrix + ": " + e.what());
  }
  out << "n: " << a.n() << '\n'
      << "nnz: " << a.nnz() << '\n'
      << "symmetric: " << (a.is_symmetric() ? "yes" : "no") << '\n'
      << "frobenius_norm: " << format_shortest(a.frobenius_norm()) << '\n';
  if (a.n() > info_dense_limit) {
    err << "cond2: skipped, n = " << a.n() << " exceeds the dense limit " << info_dense_limit << '\n';
    return exit_ok;
  }
  out << "cond2: " << format_shortest(cond2(a.to_dense())) << '\n';
  return exit_ok;
}

int guarded(std::ostream& err, const auto& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
}

}  // namespace

int run_solve(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"", "sstep solve"};
  SolveOptions o;
  configure_solve(app, o);
  if (auto code = parse_app(app, args, out, err)) return *code;
  return guarded(err, [&] { return solve_command(o, out); });
}

int run_gen(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"", "sstep gen"};
  GenOptions o;
  configure_gen(app, o);
  if (auto code = parse_app(app, args, out, err)) return *code;
  return guarded(err, [&] { return gen_command(o, out); });
}

int run_info(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"", "sstep info"};
  InfoOptions o;
  configure_info(app, o);
  if (auto code = parse_app(app, args, out, err)) return *code;
  return guarded(err, [&] { return info_command(o, out, err); });
}

namespace {

const char* top_usage =
    "usage: sstep <solve|gen|info> [flags]\n"
    "  solve  run s-step GMRES\n"
    "  gen    write a randsvd test matrix\n"
    "  info   print matrix properties\n"
    "Run 'sstep <command> --help' for flags.\n";

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << top_usage;
    return exit_usage;
  }
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  if (args[0] == "solve") return run_solve(rest, out, err);
  if (args[0] == "gen") return run_gen(rest, out, err);
  if (args[0] == "info") return run_info(rest, out, err);
  if (args[0] == "--help" || args[0] == "-h") {
    out << top_usage;
    return exit_ok;
  }
  err << "error: unknown command '" << args[0] << "'\n" << top_usage;
  return exit_usage;
}

std::vector<std::string> flag_names(const std::string& subcommand) {
  CLI::App app{"", "sstep " + std::string(subcommand)};
  SolveOptions so;
  GenOptions go;
  InfoOptions io;
  if (subcommand == "solve") configure_solve(app, so);
  else if (subcommand == "gen") configure_gen(app, go);
  else if (subcommand == "info") configure_info(app, io);
  else throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
  std::vector<std::string> names;
  for (const CLI::Option* opt : app.get_options())
    for (const auto& l : opt->get_lnames()) names.push_back("--" + l);
  return names;
}

std::string help_text(const std::string& subcommand) {
  std::ostringstream out, err;
  run({subcommand, "--help"}, out, err);
  return out.str();
}

std::string sigma_sidecar_path(const std::string& matrix_path) { return matrix_path + ".sigma"; }

}  // namespace sstep::cli
