#include "omtl/relatedness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "omtl/error.hpp"

namespace omtl {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

RuleOutcome skipped(std::string reason) { return RuleOutcome{std::nullopt, std::move(reason)}; }

// Lifts the spectrum by ridge when the candidate sits on the SPD floor.
std::optional<SymMatrix> ridge_repair(SymMatrix candidate, double ridge) {
  if (!all_finite(candidate.matrix())) return std::nullopt;
  if (min_eigenvalue(candidate) > kSpdFloor) return candidate;
  if (ridge <= 0.0) return std::nullopt;
  SymMatrix lifted = candidate + ridge * SymMatrix::identity(candidate.order());
  if (min_eigenvalue(lifted) > kSpdFloor) return lifted;
  return std::nullopt;
}

RuleOutcome batch_optimal(const RelatednessRule& rule, const WeightMatrix& w) {
  const SymMatrix root = spd_sqrt(column_gram(w));
  const double tr = trace(root);
  if (tr < kSpdFloor) return skipped("BatchOPT: trace of (W^T W)^(1/2) is zero");
  auto repaired = ridge_repair((1.0 / tr) * root, rule.ridge);
  if (!repaired) return skipped("BatchOPT: candidate not positive definite");
  // Keep unit trace after any ridge lift.
  const double t = trace(*repaired);
  return RuleOutcome{(1.0 / t) * *repaired, {}};
}

RuleOutcome covariance(const RelatednessRule& rule, const WeightMatrix& w) {
  auto repaired = ridge_repair(column_covariance(w, rule.ridge), rule.ridge);
  if (!repaired) return skipped("OMTLCOV: covariance not positive definite");
  return RuleOutcome{std::move(*repaired), {}};
}

RuleOutcome log_det(const RelatednessRule& rule, const WeightMatrix& w, const SymMatrix& previous_inverse) {
  const SymMatrix precision = previous_inverse + rule.eta * column_gram(w);
  if (!all_finite(precision.matrix())) return skipped("OMTLLOG: non-finite precision");
  const auto eig = eig_sym(precision);
  if (eig.eigenvalues.front() <= kSpdFloor) return skipped("OMTLLOG: precision not positive definite");
  auto repaired = ridge_repair(spectral_apply(eig, [](double l) { return 1.0 / l; }), rule.ridge);
  if (!repaired) return skipped("OMTLLOG: candidate not positive definite");
  return RuleOutcome{std::move(*repaired), {}};
}

RuleOutcome von_neumann(const RelatednessRule& rule, const WeightMatrix& w, const SymMatrix& previous) {
  const SymMatrix exponent = spd_log(previous) - rule.eta * column_gram(w);
  if (!all_finite(exponent.matrix())) return skipped("OMTLVON: non-finite exponent");
  SymMatrix candidate = sym_exp(exponent);
  if (rule.von_neumann_inverse) {
    if (!all_finite(candidate.matrix()) || min_eigenvalue(candidate) <= kSpdFloor)
      return skipped("OMTLVON: exponential not invertible");
    candidate = spd_inverse(candidate);
  }
  auto repaired = ridge_repair(std::move(candidate), rule.ridge);
  if (!repaired) return skipped("OMTLVON: candidate not positive definite");
  return RuleOutcome{std::move(*repaired), {}};
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::CMTL: return "CMTL";
    case Method::BatchOPT: return "BatchOPT";
    case Method::OMTLCOV: return "OMTLCOV";
    case Method::OMTLLOG: return "OMTLLOG";
    case Method::OMTLVON: return "OMTLVON";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (iequals(name, to_string(m))) return m;
  return std::nullopt;
}

SymMatrix fixed_interaction(std::size_t k) {
  Matrix a(k, k, -1.0);
  for (std::size_t i = 0; i < k; ++i) a(i, i) = static_cast<double>(k);
  return SymMatrix(std::move(a));
}

SymMatrix fixed_interaction_inverse(std::size_t k) {
  const double scale = 1.0 / static_cast<double>(k + 1);
  Matrix a(k, k, scale);
  for (std::size_t i = 0; i < k; ++i) a(i, i) = 2.0 * scale;
  return SymMatrix(std::move(a));
}

SymMatrix initial_interaction(Method method, std::size_t k) {
  if (method == Method::CMTL) return fixed_interaction(k);
  return (1.0 / static_cast<double>(k)) * SymMatrix::identity(k);
}

RuleOutcome update_relatedness(const RelatednessRule& rule, const WeightMatrix& weights, const SymMatrix& previous,
                               const SymMatrix& previous_inverse) {
  try {
    switch (rule.method) {
      case Method::CMTL: break;
      case Method::BatchOPT: return batch_optimal(rule, weights);
      case Method::OMTLCOV: return covariance(rule, weights);
      case Method::OMTLLOG: return log_det(rule, weights, previous_inverse);
      case Method::OMTLVON: return von_neumann(rule, weights, previous);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InsufficientRows) throw;
    return skipped(std::string(to_string(rule.method)) + ": " + e.what());
  }
  throw Error(ErrorCode::InvalidMatrix, "CMTL keeps a fixed interaction matrix");
}

}  // namespace omtl
