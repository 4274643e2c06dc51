#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "omtl/linalg.hpp"

namespace omtl {

/// How the task interaction matrix A is handled.
enum class Method {
  CMTL,      // fixed A, never updated
  BatchOPT,  // A = (W^T W)^(1/2) / tr((W^T W)^(1/2))
  OMTLCOV,   // A = cov(W) + ridge I
  OMTLLOG,   // A = (A^-1 + eta sym(W^T W))^-1
  OMTLVON,   // A = exp(log A - eta sym(W^T W))
};

inline constexpr Method kAllMethods[] = {Method::CMTL, Method::BatchOPT, Method::OMTLCOV, Method::OMTLLOG,
                                         Method::OMTLVON};

std::string_view to_string(Method m);
/// Case-insensitive; nullopt for unknown names.
std::optional<Method> parse_method(std::string_view name);

struct RelatednessRule {
  Method method = Method::CMTL;
  double eta = 0.1;
  double ridge = 1e-6;
  /// OMTLVON only: invert the matrix exponential before use as A.
  bool von_neumann_inverse = false;
};

/// Uniform-relatedness matrix (k+1) I - 1 1^T. Its inverse is
/// (I + 1 1^T) / (k+1): each mistake moves the owning task by 2/(k+1)
/// and every other task by 1/(k+1).
SymMatrix fixed_interaction(std::size_t k);

/// Closed form of fixed_interaction(k)^-1.
SymMatrix fixed_interaction_inverse(std::size_t k);

/// Starting A: fixed_interaction(k) for CMTL, (1/k) I otherwise.
SymMatrix initial_interaction(Method method, std::size_t k);

struct RuleOutcome {
  std::optional<SymMatrix> interaction;  // empty when the rule was skipped
  std::string skip_reason;

  bool accepted() const noexcept { return interaction.has_value(); }
};

/// Re-estimates A from the current weights. Never throws for numerical
/// trouble: a candidate that is not SPD after ridge repair, or that is
/// non-finite, comes back as a skipped outcome and the caller keeps A.
/// Calling this with Method::CMTL is a logic error (InvalidMatrix).
RuleOutcome update_relatedness(const RelatednessRule& rule, const WeightMatrix& weights, const SymMatrix& previous,
                               const SymMatrix& previous_inverse);

}  // namespace omtl
