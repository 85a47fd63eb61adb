#pragma once

// Built-in benchmark problems and the method x frame comparison matrix.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "crfc/solver.hpp"

namespace crfc {

struct BenchOptions {
  std::optional<ElementKind> kind;  // mesh element where a benchmark offers two
  std::optional<int> steps;
};

struct Benchmark {
  std::string name;
  Model model;
  int steps = 20;
  std::vector<Method> methods;
  std::vector<FrameStrategy> frames;
};

std::vector<std::string> benchmark_names();
/// Throws UnknownBenchmark.
Benchmark generate(const std::string& name, const BenchOptions& opt = {});

/// Copy of the model with every element switched to strategy s.
Model with_frame(const Model& m, FrameStrategy s);

/// max |a - b| / max |b| over the common monitor histories; infinity when
/// the histories differ in length.
double curve_deviation(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b);

std::vector<std::vector<double>> monitor_history(const RunResult& r);

struct MatrixCell {
  Method method = Method::S;
  FrameStrategy frame = FrameStrategy::SideAlign2D;
  RunResult result;
  std::string error;
  double max_unbalanced = 0.0;
  double max_equilibrium_ratio = 0.0;
  double seconds = 0.0;
};

struct MatrixReport {
  std::string name;
  std::vector<std::string> monitor_names;
  std::vector<MatrixCell> cells;
  const MatrixCell* find(Method m, FrameStrategy f) const;
  /// Deviation between two cells; infinity when either failed.
  double deviation(Method a, Method b, FrameStrategy f) const;
};

MatrixReport run_matrix(const Benchmark& b, const std::vector<Method>& methods,
                        const std::vector<FrameStrategy>& frames, const SolverConfig& base);

std::string history_csv(const Model& m, const RunResult& r);
std::string diagnostics_csv(const RunResult& r);
std::string summary_text(const MatrixReport& rep);
/// Writes one history and diagnostics CSV per cell plus summary.txt.
void write_report(const MatrixReport& rep, const Model& m, const std::string& dir);

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace crfc
