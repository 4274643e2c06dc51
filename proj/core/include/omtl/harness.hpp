#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "omtl/dataset.hpp"
#include "omtl/learner.hpp"
#include "omtl/relatedness.hpp"

namespace omtl {

enum class EvalMode {
  Stream,  // online mistake rate over the permuted stream
  Split,   // learn on the permuted training stream, score a frozen model on the test set
};

struct ExperimentConfig {
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::vector<double> epochs{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> etas{0.01, 0.05, 0.1, 0.5};
  std::size_t permutations = 20;
  double ridge = 1e-6;
  std::uint64_t seed = 20240601;
  /// 0 = hardware concurrency.
  std::size_t threads = 0;
  bool von_neumann_inverse = false;
  EvalMode mode = EvalMode::Stream;

  void validate() const;
};

/// Outcome of one permutation of one cell.
struct PermutationOutcome {
  std::size_t permutation = 0;
  bool ok = false;
  double error = 0.0;
  double post_gate_error = 0.0;
  std::string failure;
};

struct CellSpec {
  Method method = Method::CMTL;
  double epoch = 0.5;
  double eta = 0.1;
  double ridge = 1e-6;
  bool von_neumann_inverse = false;
  EvalMode mode = EvalMode::Stream;
};

/// Permutation p shuffles `train` with PermutationSeed{seed, p}. In Split
/// mode `test` must be non-null.
std::vector<PermutationOutcome> run_cell(const Dataset& train, const CellSpec& cell, std::size_t permutations,
                                         std::uint64_t seed, const Dataset* test = nullptr);

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
};

/// Throws EmptyCell on empty input.
Aggregate aggregate(std::span<const double> values);

struct CellReport {
  Method method = Method::CMTL;
  double epoch = 0.0;
  double eta = 0.0;
  std::vector<PermutationOutcome> outcomes;
  Aggregate summary;
  Aggregate post_gate_summary;
  bool partial = false;
  double wall_seconds = 0.0;

  std::vector<double> errors() const;
};

struct ExperimentReport {
  std::string dataset;
  std::vector<CellReport> cells;  // ordered by (method, epoch, eta) as configured

  bool partial() const;
  /// method,epoch,eta,permutation,error,post_epoch_error
  void write_permutation_csv(std::ostream& out) const;
  /// method,epoch,eta,mean,std
  void write_summary_csv(std::ostream& out) const;
  /// Aligned table, errors in percent as "mean (std)".
  void write_table(std::ostream& out) const;
  /// method,eta,epoch,mean,std sorted for plotting error against epoch.
  void write_plot_csv(std::ostream& out) const;
};

/// Evaluates the full methods x epochs x etas grid. Jobs run on a worker
/// pool; results are placed by (cell, permutation) index, so the report
/// does not depend on scheduling.
ExperimentReport epoch_sweep(const Dataset& train, const ExperimentConfig& cfg, const Dataset* test = nullptr);

/// Rebuilds a report (outcomes and summaries, no timings) from a
/// permutation CSV written by write_permutation_csv. Throws ParseError.
ExperimentReport read_permutation_csv(std::istream& in);

struct SynthParams {
  std::size_t tasks = 4;
  std::size_t dim = 20;
  double relatedness = 0.8;
  std::size_t examples = 2000;
  double noise = 0.05;
  std::uint64_t seed = 7;
};

/// Task k's true weights are normalize(r * shared + (1 - r) * own_k) with
/// shared and own_k random unit directions. Instances are uniform on the
/// unit sphere, tasks assigned round-robin, labels sign(u_k . x) flipped
/// with probability `noise`.
Dataset synth_related_tasks(const SynthParams& p);

/// The true per-task directions synth_related_tasks(p) labels with.
std::vector<std::vector<double>> synth_true_weights(const SynthParams& p);

}  // namespace omtl
