// pevcond: polynomial eigenvalues, condition numbers and expected-condition
// experiments from the command line.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "pevcond/acceptance.hpp"
#include "pevcond/closedform.hpp"
#include "pevcond/conditioning.hpp"
#include "pevcond/experiment.hpp"
#include "pevcond/io.hpp"

namespace {

using namespace pevcond;
using io::Json;

std::size_t resolve_workers(std::size_t requested) {
  if (const char* env = std::getenv("PEVCOND_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw ConfigError("PEVCOND_WORKERS must be a positive integer");
  }
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text << '\n';
}

int cmd_solve(const std::string& input, const std::string& output) {
  const MatrixPolynomial mp = io::polynomial_from_json(io::read_json_file(input));
  write_output(output, io::dump_string(io::condition_report_to_json(total_condition(mp))));
  return 0;
}

int cmd_expect(const std::string& ensemble, std::size_t n, std::size_t d, bool as_json) {
  const EnsembleKind kind = ensemble_kind_from_string(ensemble);
  if (kind == EnsembleKind::Subspace) throw ConfigError("expect supports gaussian and goe");
  if (n == 0 || d == 0) throw ConfigError("n and d must be positive");
  const EnsembleSpec spec{kind, n, d, {}};
  const ClosedFormValue exact = *closed_form_for(spec);
  const ClosedFormValue asym = *asymptotic_for(spec);
  const ClosedFormValue bound = upper_bound(n, spec.dimension(), d);
  if (as_json) {
    const Json j{{"ensemble", ensemble},
                 {"n", n},
                 {"d", d},
                 {"exact", io::closed_form_to_json(exact)},
                 {"asymptotic", io::closed_form_to_json(asym)},
                 {"bound", io::closed_form_to_json(bound)}};
    std::cout << io::dump_string(j) << '\n';
  } else {
    std::cout << "exact      " << io::format_double(exact.value) << "  (" << to_string(exact.formula_id)
              << (exact.approximate ? ", approximate" : "") << (exact.formal ? ", formal" : "") << ")\n"
              << "asymptotic " << io::format_double(asym.value) << '\n'
              << "bound      " << io::format_double(bound.value) << '\n';
  }
  return 0;
}

struct McArgs {
  std::string ensemble = "gaussian";
  std::string basis_path;
  std::size_t n = 2, d = 1, trials = 10000, mom_blocks = 0, workers = 0;
  std::uint64_t seed = 0;
  double trim = 0.0;
  std::string out, raw;
};

int cmd_mc(const McArgs& a) {
  ExperimentConfig cfg;
  if (a.ensemble == "subspace") {
    if (a.basis_path.empty()) throw ConfigError("--basis is required for the subspace ensemble");
    Json doc = io::read_json_file(a.basis_path);
    if (doc.is_array()) doc = Json{{"kind", "subspace"}, {"n", a.n}, {"d", a.d}, {"basis", doc}};
    cfg.spec = io::ensemble_from_json(doc);
  } else {
    cfg.spec = {ensemble_kind_from_string(a.ensemble), a.n, a.d, {}};
  }
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.mom_blocks = a.mom_blocks;
  cfg.trim = a.trim;
  cfg.workers = resolve_workers(a.workers);
  const McReport rep = run_experiment(cfg);
  if (!a.raw.empty()) {
    std::ofstream raw(a.raw);
    if (!raw) throw ConfigError("cannot write '" + a.raw + "'");
    io::write_raw_samples(rep, raw);
  }
  if (rep.invalid_count() > 0) std::cerr << "warning: " << rep.invalid_count() << " invalid trial(s) excluded\n";
  write_output(a.out, io::dump_string(io::report_to_json(rep, a.raw)));
  return 0;
}

int cmd_sweep(const std::string& grid_path, const std::string& out_path, std::size_t workers) {
  SweepGrid grid = io::grid_from_json(io::read_json_file(grid_path));
  grid.workers = resolve_workers(workers > 0 ? workers : grid.workers);
  const auto rows = sweep(grid);
  std::ofstream out(out_path);
  if (!out) throw ConfigError("cannot write '" + out_path + "'");
  io::write_sweep_csv(rows, out);
  for (const auto& r : rows)
    if (!r.error.empty())
      std::cerr << "cell " << to_string(r.ensemble) << " n=" << r.n << " d=" << r.d << " failed: " << r.error << '\n';
  return 0;
}

int cmd_verify(const std::string& suite, std::size_t workers) {
  const auto s = suite == "full" ? acceptance::Suite::Full : acceptance::Suite::Quick;
  const auto results = acceptance::run_all(s, resolve_workers(workers), [](const acceptance::CriterionResult& r) {
    std::cout << acceptance::format_line(r) << std::endl;
  });
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed;
  std::cout << (ok ? "all criteria passed" : "some criteria FAILED") << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real polynomial eigenvalues, their condition numbers, and Monte Carlo checks of expected conditioning"};
  app.require_subcommand(1);

  std::string input, output;
  auto* solve = app.add_subcommand("solve", "Real eigenvalues and condition numbers of a matrix polynomial");
  solve->add_option("--input", input, "Matrix polynomial JSON document")->required();
  solve->add_option("--output", output, "Write the report here instead of stdout");

  std::string ensemble = "gaussian";
  std::size_t n = 2, d = 1;
  bool as_json = false;
  auto* expect = app.add_subcommand("expect", "Closed-form expectation, asymptotic and upper bound");
  expect->add_option("--ensemble", ensemble)->check(CLI::IsMember({"gaussian", "goe"}));
  expect->add_option("--n", n)->required();
  expect->add_option("--d", d)->required();
  expect->add_flag("--json", as_json);

  McArgs mc_args;
  auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of E mu(A)");
  mc->add_option("--ensemble", mc_args.ensemble)->check(CLI::IsMember({"gaussian", "goe", "subspace"}));
  mc->add_option("--basis", mc_args.basis_path, "Subspace basis JSON (ensemble document or array of matrices)");
  mc->add_option("--n", mc_args.n)->required();
  mc->add_option("--d", mc_args.d)->required();
  mc->add_option("--trials", mc_args.trials)->required();
  mc->add_option("--seed", mc_args.seed)->required();
  mc->add_option("--mom-blocks", mc_args.mom_blocks, "Median-of-means blocks (default ceil(sqrt(trials)))");
  mc->add_option("--trim", mc_args.trim, "Trimmed-mean fraction in [0, 0.05]");
  mc->add_option("--workers", mc_args.workers);
  mc->add_option("--out", mc_args.out, "Report JSON path (default stdout)");
  mc->add_option("--raw", mc_args.raw, "Per-trial samples CSV path");

  std::string grid_path, table_path;
  std::size_t sweep_workers = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo over a grid of (ensemble, n, d)");
  sweep_cmd->add_option("--grid", grid_path)->required();
  sweep_cmd->add_option("--out", table_path)->required();
  sweep_cmd->add_option("--workers", sweep_workers);

  std::string suite = "quick";
  std::size_t verify_workers = 0;
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--suite", suite)->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--workers", verify_workers);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(input, output);
    if (*expect) return cmd_expect(ensemble, n, d, as_json);
    if (*mc) return cmd_mc(mc_args);
    if (*sweep_cmd) return cmd_sweep(grid_path, table_path, sweep_workers);
    if (*verify) return cmd_verify(suite, verify_workers);
  } catch (const pevcond::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
