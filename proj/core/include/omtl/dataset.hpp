#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "omtl/learner.hpp"

namespace omtl {

struct Dataset {
  std::string name;
  std::size_t tasks = 1;
  std::size_t dim = 0;
  std::vector<TaskExample> examples;

  std::size_t size() const noexcept { return examples.size(); }
  bool empty() const noexcept { return examples.empty(); }
};

struct ParseOptions {
  /// Scale every feature vector to unit L2 norm. Zero vectors are kept as is.
  bool normalize = true;
  /// Pad vectors to at least this many features.
  std::size_t min_dim = 0;
};

/// libsvm-style "label idx:val ..." lines, 1-based indices. Labels 0/1 or
/// -1/+1 map to -1/+1. Blank lines and '#' comments are skipped.
Dataset parse_sparse(std::istream& in, std::size_t task, const ParseOptions& opts = {}, std::string name = {});

/// Header row required; every column except `label_column` is a feature,
/// in header order.
Dataset parse_dense_csv(std::istream& in, std::string_view label_column, std::size_t task,
                        const ParseOptions& opts = {}, std::string name = {});

/// Writes the sparse format with round-trip precision; zero entries omitted.
void write_sparse(std::ostream& out, const Dataset& ds);

/// Scales x to unit norm in place; returns false (and leaves x) for a zero vector.
bool normalize_l2(std::span<double> x);

/// Zero-pads every example to `dim` features; never truncates.
void pad_to(Dataset& ds, std::size_t dim);

struct TaskPart {
  Dataset data;
  std::size_t task = 0;
};

/// Concatenates parts in order, retagging each part's examples with its task
/// index. K is the number of parts; dimension is the max over parts.
Dataset merge_tasks(std::vector<TaskPart> parts);

Dataset filter_task(const Dataset& ds, std::size_t task);

struct PermutationSeed {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
};

/// SplitMix64 finalizer; used to derive independent generator seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the mt19937_64 stream driving permutation `p.index`:
/// splitmix64(p.seed ^ splitmix64(p.index)).
std::uint64_t permutation_stream_seed(const PermutationSeed& p);

/// Index order produced by the shuffle below: permute(ds, s).examples[i] ==
/// ds.examples[permutation_order(ds.size(), s)[i]].
std::vector<std::size_t> permutation_order(std::size_t n, const PermutationSeed& seed);

/// Fisher-Yates shuffle (i from n-1 down to 1, j uniform in [0, i] by
/// rejection sampling on mt19937_64 output).
Dataset permute(const Dataset& ds, const PermutationSeed& seed);

}  // namespace omtl
