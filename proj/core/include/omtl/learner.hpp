#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "omtl/linalg.hpp"
#include "omtl/relatedness.hpp"

namespace omtl {

/// One labeled instance of the online stream.
struct TaskExample {
  std::size_t task = 0;
  std::vector<double> features;
  int label = 1;  // -1 or +1

  bool operator==(const TaskExample&) const = default;
};

struct LearnerConfig {
  Method method = Method::CMTL;
  double eta = 0.1;
  /// Fraction of total_rounds seen before A may change.
  double epoch_fraction = 0.5;
  std::size_t total_rounds = 0;
  double ridge = 1e-6;
  std::size_t tasks = 1;
  std::size_t dim = 1;
  bool von_neumann_inverse = false;
  /// Starting A in place of the method default (CMTL keeps it fixed).
  /// Must be SPD of order `tasks`.
  std::optional<SymMatrix> initial_interaction;

  RelatednessRule rule() const { return {method, eta, ridge, von_neumann_inverse}; }
  /// Last round (1-based) at which A is still frozen: floor(epoch_fraction * total_rounds).
  std::size_t gate_round() const;
  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

struct ModelState {
  WeightMatrix weights;
  SymMatrix interaction;
  SymMatrix interaction_inverse;
  /// Update counter, starts at 1. CMTL bumps it on every mistake, the
  /// adaptive methods only when a mistake lands past the epoch gate.
  std::size_t s = 1;
  std::size_t mistakes = 0;
  std::size_t seen = 0;
  std::size_t relatedness_updates = 0;
  std::size_t rule_skips = 0;
};

ModelState init_model(const LearnerConfig& cfg);

/// sign(w_task . x) with sign(0) = +1.
int predict(const ModelState& state, const TaskExample& x);

struct StepResult {
  int prediction = 1;
  bool mistake = false;
  bool interaction_changed = false;
  bool rule_skipped = false;
};

/// One online round, applied in place. On a mistake every task column j
/// receives y * A^-1(j, task) * x; past the gate the adaptive methods then
/// re-estimate A from the updated weights.
StepResult step(ModelState& state, const TaskExample& x, const LearnerConfig& cfg);

/// Learner-facing wrapper over the rule module.
RuleOutcome update_relatedness(const ModelState& state, const LearnerConfig& cfg);

struct StreamResult {
  ModelState state;
  std::vector<int> predictions;
  /// 1-based rounds at which A was replaced.
  std::vector<std::size_t> interaction_change_rounds;
  std::size_t mistakes = 0;
  std::size_t post_gate_rounds = 0;
  std::size_t post_gate_mistakes = 0;

  double error_rate() const;
  /// Mistake rate over rounds after the epoch gate; 0 when there are none.
  double post_gate_error_rate() const;
};

/// Folds step() over the sequence with total_rounds = examples.size().
StreamResult run_stream(std::span<const TaskExample> examples, LearnerConfig cfg);

/// Same fold over examples[order[0]], examples[order[1]], ...
StreamResult run_stream(std::span<const TaskExample> examples, std::span<const std::size_t> order, LearnerConfig cfg);

}  // namespace omtl
