// Benchmark and verification CLI. Subcommands:
//   verify   cross-module oracle suite (exit 1 on any failure)
//   spmv     100 matrix-vector products per mesh level
//   solvers  Krylov method x preconditioner sweep on the linearized system
//   direct   banded Cholesky / LU direct solves
//   newton   full nonlinear solve, explicit and matrix-free operators
// Exit status: 0 success, 1 verification/runtime failure, 2 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "adfem/bench.hpp"

#include "CLI11.hpp"

namespace {

using adfem::bench::BenchConfig;
using adfem::bench::BenchRecord;

struct CommonArgs {
  std::string config_path;
  std::string out_path = "results.csv";
  long long seed = -1;
  int reps = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file (see README for keys)");
  cmd->add_option("--out", args.out_path, "output CSV path");
  cmd->add_option("--seed", args.seed, "RNG seed override");
  cmd->add_option("--reps", args.reps, "repetition count override");
}

BenchConfig make_config(const CommonArgs& args) {
  BenchConfig cfg;
  if (!args.config_path.empty()) cfg = adfem::bench::load_config(args.config_path);
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (args.reps >= 1) cfg.reps = args.reps;
  cfg.validate();
  return cfg;
}

void write_records(const std::string& path, const std::vector<BenchRecord>& records,
                   const BenchConfig& cfg, const std::string& experiment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  adfem::bench::write_csv(out, records, cfg, experiment);
  std::printf("%s: %zu records -> %s\n", experiment.c_str(), records.size(), path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adfem benchmark harness"};
  app.require_subcommand(1);

  CommonArgs args;
  bool verify_parallel = false;

  CLI::App* verify = app.add_subcommand("verify", "run the cross-module verification suite");
  verify->add_option("--seed", args.seed, "RNG seed override");
  verify->add_flag("--parallel", verify_parallel, "run independent checks concurrently");

  CLI::App* spmv = app.add_subcommand("spmv", "matrix-vector product microbenchmark");
  add_common(spmv, args);
  CLI::App* solvers = app.add_subcommand("solvers", "iterative solver/preconditioner sweep");
  add_common(solvers, args);
  CLI::App* direct = app.add_subcommand("direct", "direct factorization benchmark");
  add_common(direct, args);
  CLI::App* newton = app.add_subcommand("newton", "nonlinear benchmark, both operator kinds");
  add_common(newton, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed()) {
      adfem::VerifyOptions opts;
      if (args.seed >= 0) opts.seed = static_cast<std::uint64_t>(args.seed);
      opts.parallel = verify_parallel;
      return adfem::bench::cmd_verify(std::cout, opts);
    }
    const BenchConfig cfg = make_config(args);
    if (spmv->parsed()) {
      write_records(args.out_path, adfem::bench::cmd_spmv(cfg), cfg, "spmv");
    } else if (solvers->parsed()) {
      write_records(args.out_path, adfem::bench::cmd_solvers(cfg), cfg, "solvers");
    } else if (direct->parsed()) {
      write_records(args.out_path, adfem::bench::cmd_direct(cfg), cfg, "direct");
    } else if (newton->parsed()) {
      const adfem::bench::NewtonRunResult run = adfem::bench::cmd_newton(cfg);
      write_records(args.out_path, run.records, cfg, "newton");
      const std::string log_path = args.out_path + ".log";
      std::ofstream log(log_path);
      log << run.log_text;
      std::printf("newton: per-iteration log -> %s\n", log_path.c_str());
    }
  } catch (const adfem::bench::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
