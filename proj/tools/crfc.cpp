// crfc: run models, benchmarks and invariant checks from the command line.
//
// Exit codes: 0 success, 1 input error, 2 partial run (solver failure; the
// converged history is still written).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "crfc/bench.hpp"
#include "crfc/model_io.hpp"
#include "crfc/verify.hpp"

using namespace crfc;

namespace {

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct SolverFlags {
  std::string method = "sc1";
  int steps = 0;  // 0: model or benchmark default
  double tol = 1e-5;
  int max_iter = 30;
};

void add_solver_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("--steps", f.steps, "equal load steps");
  app->add_option("--tol", f.tol, "residual tolerance")->capture_default_str();
  app->add_option("--max-iter", f.max_iter, "Newton iterations per step")->capture_default_str();
}

SolverConfig config_of(const SolverFlags& f) {
  SolverConfig cfg;
  cfg.method = parse_method(f.method);
  if (f.steps > 0) cfg.steps = f.steps;
  cfg.tol = f.tol;
  cfg.max_iter = f.max_iter;
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
}

int cmd_run(const std::string& file, const SolverFlags& flags, const std::string& frame, const std::string& out,
            const std::string& diag) {
  Model m;
  SolverConfig cfg;
  try {
    m = read_model(file);
    if (!frame.empty())
      for (auto& e : m.elements) {
        e.frame = parse_frame(frame, e.kind);
        check_compatible(e.kind, e.frame);
      }
    cfg = config_of(flags);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  RunResult r;
  try {
    r = run(Prepared(m), cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  write_text(out, history_csv(m, r));
  if (!diag.empty()) write_text(diag, diagnostics_csv(r));
  if (!r.completed) {
    std::cerr << "partial run: " << r.failure << "\n";
    return 2;
  }
  return 0;
}

int cmd_bench(const std::string& name, const SolverFlags& flags, const std::string& frames,
              const std::string& methods, const std::string& kind, const std::string& out) {
  Benchmark b;
  std::vector<Method> ms;
  std::vector<FrameStrategy> fs;
  SolverConfig cfg;
  try {
    BenchOptions opt;
    if (!kind.empty()) opt.kind = parse_element_kind(kind);
    if (flags.steps > 0) opt.steps = flags.steps;
    b = generate(name, opt);
    cfg = config_of(flags);
    ms = b.methods;
    if (!methods.empty()) {
      ms.clear();
      for (const auto& s : split(methods)) ms.push_back(parse_method(s));
    }
    fs = b.frames;
    if (!frames.empty()) {
      fs.clear();
      const ElementKind k = b.model.elements.front().kind;
      for (const auto& s : split(frames)) {
        fs.push_back(parse_frame(s, k));
        check_compatible(k, fs.back());
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const MatrixReport rep = run_matrix(b, ms, fs, cfg);
  const std::string dir = out.empty() ? "bench_out/" + name : out;
  write_report(rep, b.model, dir);
  std::cout << summary_text(rep) << "\nreport written to " << dir << "\n";
  for (const auto& c : rep.cells)
    if (!c.result.completed) return 2;
  return 0;
}

int cmd_verify(std::uint64_t seed, const std::string& only) {
  std::vector<VerifyCheck> checks;
  try {
    checks = run_verify(seed, only);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  int failed = 0;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.module << ": " << c.name << " (worst " << c.worst << ", tol "
              << c.tol << ")\n";
    if (!c.passed) ++failed;
  }
  std::cout << checks.size() - failed << "/" << checks.size() << " checks passed (seed " << seed << ")\n";
  return failed ? 1 : 0;
}

int cmd_export(const std::string& name, const std::string& kind, const std::string& out) {
  try {
    BenchOptions opt;
    if (!kind.empty()) opt.kind = parse_element_kind(kind);
    write_text(out, write_model(generate(name, opt).model) + "\n");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-rotational internal force comparison: S, S+P and corrected S methods"};
  app.require_subcommand(1);

  SolverFlags run_flags;
  std::string run_file, run_frame, run_out, run_diag;
  auto* run_cmd = app.add_subcommand("run", "solve a model file and write the monitor history CSV");
  run_cmd->add_option("model", run_file, "JSON model file")->required();
  run_cmd->add_option("--method", run_flags.method, "s, sp, sc1, sc2 or sc3")->capture_default_str();
  run_cmd->add_option("--frame", run_frame, "override the element frame (side, lsq, polar, beam, quadshell)");
  run_cmd->add_option("--out", run_out, "history CSV (stdout when omitted)");
  run_cmd->add_option("--diag", run_diag, "per-element unbalanced moment CSV");
  add_solver_flags(run_cmd, run_flags);

  SolverFlags bench_flags;
  std::string bench_name, bench_frames, bench_methods, bench_kind, bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "run a built-in benchmark over methods and frames");
  bench_cmd->add_option("name", bench_name, "benchmark name")->required();
  bench_cmd->add_option("--methods", bench_methods, "comma separated methods (benchmark default when omitted)");
  bench_cmd->add_option("--frames", bench_frames, "comma separated frames (benchmark default when omitted)");
  bench_cmd->add_option("--kind", bench_kind, "mesh element kind where the benchmark offers two");
  bench_cmd->add_option("--out", bench_out, "report directory (default bench_out/<name>)");
  add_solver_flags(bench_cmd, bench_flags);

  std::uint64_t seed = 20260101;
  std::string only;
  auto* verify_cmd = app.add_subcommand("verify", "run the seeded invariant checks");
  verify_cmd->add_option("--seed", seed, "random seed")->capture_default_str();
  verify_cmd->add_option("--only", only, "restrict to one module");

  std::string export_name, export_kind, export_out;
  auto* export_cmd = app.add_subcommand("export", "write a built-in benchmark model as JSON");
  export_cmd->add_option("name", export_name, "benchmark name")->required();
  export_cmd->add_option("--kind", export_kind, "mesh element kind where the benchmark offers two");
  export_cmd->add_option("--out", export_out, "output file (stdout when omitted)");

  auto* list_cmd = app.add_subcommand("list", "list benchmarks and verify modules");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*run_cmd) return cmd_run(run_file, run_flags, run_frame, run_out, run_diag);
  if (*bench_cmd) return cmd_bench(bench_name, bench_flags, bench_frames, bench_methods, bench_kind, bench_out);
  if (*verify_cmd) return cmd_verify(seed, only);
  if (*export_cmd) return cmd_export(export_name, export_kind, export_out);
  if (*list_cmd) {
    std::cout << "benchmarks:";
    for (const auto& n : benchmark_names()) std::cout << " " << n;
    std::cout << "\nverify modules:";
    for (const auto& n : verify_modules()) std::cout << " " << n;
    std::cout << "\n";
  }
  return 0;
}
