#include "omtl/learner.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "omtl/error.hpp"

namespace omtl {

std::size_t LearnerConfig::gate_round() const {
  return static_cast<std::size_t>(std::floor(epoch_fraction * static_cast<double>(total_rounds)));
}

void LearnerConfig::validate() const {
  if (tasks < 1) throw Error(ErrorCode::ConfigError, "tasks must be >= 1");
  if (dim < 1) throw Error(ErrorCode::ConfigError, "dim must be >= 1");
  if (!(epoch_fraction >= 0.0 && epoch_fraction <= 1.0))
    throw Error(ErrorCode::ConfigError, "epoch_fraction must lie in [0, 1]");
  if ((method == Method::OMTLLOG || method == Method::OMTLVON) && !(eta > 0.0))
    throw Error(ErrorCode::ConfigError, "eta must be positive for " + std::string(to_string(method)));
  if (!(ridge >= 0.0)) throw Error(ErrorCode::ConfigError, "ridge must be nonnegative");
  if (initial_interaction && initial_interaction->order() != tasks)
    throw Error(ErrorCode::ConfigError, "initial interaction matrix order differs from task count");
}

ModelState init_model(const LearnerConfig& cfg) {
  cfg.validate();
  if (cfg.initial_interaction) {
    SymMatrix a_inv = spd_inverse(*cfg.initial_interaction);
    return ModelState{WeightMatrix(cfg.dim, cfg.tasks), *cfg.initial_interaction, std::move(a_inv)};
  }
  SymMatrix a = initial_interaction(cfg.method, cfg.tasks);
  SymMatrix a_inv = cfg.method == Method::CMTL
                        ? fixed_interaction_inverse(cfg.tasks)
                        : static_cast<double>(cfg.tasks) * SymMatrix::identity(cfg.tasks);
  return ModelState{WeightMatrix(cfg.dim, cfg.tasks), std::move(a), std::move(a_inv)};
}

int predict(const ModelState& state, const TaskExample& x) {
  if (x.task >= state.weights.tasks())
    throw Error(ErrorCode::UnknownTask,
                "task " + std::to_string(x.task) + " with K=" + std::to_string(state.weights.tasks()));
  if (x.features.size() != state.weights.dim())
    throw Error(ErrorCode::DimensionMismatch, "instance has " + std::to_string(x.features.size()) +
                                                  " features, model expects " + std::to_string(state.weights.dim()));
  const auto w = state.weights.column(x.task);
  const double margin = std::inner_product(w.begin(), w.end(), x.features.begin(), 0.0);
  return margin >= 0.0 ? 1 : -1;
}

RuleOutcome update_relatedness(const ModelState& state, const LearnerConfig& cfg) {
  return update_relatedness(cfg.rule(), state.weights, state.interaction, state.interaction_inverse);
}

StepResult step(ModelState& state, const TaskExample& x, const LearnerConfig& cfg) {
  StepResult out;
  out.prediction = predict(state, x);
  ++state.seen;
  if (out.prediction == x.label) return out;

  out.mistake = true;
  ++state.mistakes;
  const double y = static_cast<double>(x.label);
  for (std::size_t j = 0; j < state.weights.tasks(); ++j) {
    const double rate = y * state.interaction_inverse(j, x.task);
    if (rate == 0.0) continue;
    auto w = state.weights.column(j);
    for (std::size_t r = 0; r < w.size(); ++r) w[r] += rate * x.features[r];
  }

  if (cfg.method == Method::CMTL) {
    ++state.s;
    return out;
  }
  if (state.seen > cfg.gate_round()) {
    RuleOutcome next = update_relatedness(state, cfg);
    if (next.accepted()) {
      state.interaction_inverse = spd_inverse(*next.interaction);
      state.interaction = std::move(*next.interaction);
      ++state.relatedness_updates;
      out.interaction_changed = true;
    } else {
      ++state.rule_skips;
      out.rule_skipped = true;
    }
    ++state.s;
  }
  return out;
}

double StreamResult::error_rate() const {
  return predictions.empty() ? 0.0 : static_cast<double>(mistakes) / static_cast<double>(predictions.size());
}

double StreamResult::post_gate_error_rate() const {
  return post_gate_rounds == 0 ? 0.0 : static_cast<double>(post_gate_mistakes) / static_cast<double>(post_gate_rounds);
}

namespace {

template <class Next>
StreamResult fold_stream(std::size_t n, LearnerConfig cfg, Next&& next) {
  cfg.total_rounds = n;
  StreamResult result{init_model(cfg), {}, {}};
  result.predictions.reserve(n);
  const std::size_t gate = cfg.gate_round();
  for (std::size_t i = 0; i < n; ++i) {
    const StepResult r = step(result.state, next(i), cfg);
    result.predictions.push_back(r.prediction);
    if (r.interaction_changed) result.interaction_change_rounds.push_back(result.state.seen);
    if (r.mistake) ++result.mistakes;
    if (result.state.seen > gate) {
      ++result.post_gate_rounds;
      if (r.mistake) ++result.post_gate_mistakes;
    }
  }
  return result;
}

}  // namespace

StreamResult run_stream(std::span<const TaskExample> examples, LearnerConfig cfg) {
  return fold_stream(examples.size(), cfg, [&](std::size_t i) -> const TaskExample& { return examples[i]; });
}

StreamResult run_stream(std::span<const TaskExample> examples, std::span<const std::size_t> order, LearnerConfig cfg) {
  for (std::size_t i : order)
    if (i >= examples.size()) throw Error(ErrorCode::DimensionMismatch, "order index out of range");
  return fold_stream(order.size(), cfg, [&](std::size_t i) -> const TaskExample& { return examples[order[i]]; });
}

}  // namespace omtl
