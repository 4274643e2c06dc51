#include "omtl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "csv.hpp"
#include "omtl/error.hpp"
#include "omtl/log.hpp"

namespace omtl {

namespace {

using detail::parse_double;

int map_label(double v, std::size_t line) {
  if (v == 1.0) return 1;
  if (v == -1.0 || v == 0.0) return -1;
  throw Error(ErrorCode::LabelError, "line " + std::to_string(line) + ": label " + detail::format_double(v) +
                                         " is not one of {-1, 0, +1}");
}

void finish(Dataset& ds, const ParseOptions& opts) {
  ds.dim = std::max(ds.dim, opts.min_dim);
  std::size_t zero_vectors = 0;
  for (auto& ex : ds.examples) {
    ex.features.resize(ds.dim, 0.0);
    if (opts.normalize && !normalize_l2(ex.features)) ++zero_vectors;
  }
  log::info(ds.name + ": " + std::to_string(ds.examples.size()) + " examples, dim " + std::to_string(ds.dim) +
            (opts.normalize ? ", L2-normalized" : ", raw"));
  if (zero_vectors > 0)
    log::warn(ds.name + ": " + std::to_string(zero_vectors) + " zero feature vectors left unnormalized");
}

}  // namespace

bool normalize_l2(std::span<double> x) {
  const double norm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
  if (norm == 0.0) return false;
  for (double& v : x) v /= norm;
  return true;
}

Dataset parse_sparse(std::istream& in, std::size_t task, const ParseOptions& opts, std::string name) {
  Dataset ds;
  ds.name = std::move(name);
  ds.tasks = task + 1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = line;
    if (const auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
    rest = detail::trim(rest);
    if (rest.empty()) continue;

    auto next_token = [&rest]() {
      const auto start = rest.find_first_not_of(" \t");
      if (start == std::string_view::npos) return std::string_view{};
      rest.remove_prefix(start);
      const auto end = rest.find_first_of(" \t");
      const std::string_view tok = rest.substr(0, end);
      rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
      return tok;
    };

    const auto label = parse_double(next_token());
    if (!label) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad label");
    TaskExample ex{task, {}, map_label(*label, line_no)};

    std::size_t last_index = 0;
    for (auto tok = next_token(); !tok.empty(); tok = next_token()) {
      const auto colon = tok.find(':');
      std::size_t index = 0;
      const auto idx_part = tok.substr(0, colon);
      const auto [ptr, ec] = std::from_chars(idx_part.data(), idx_part.data() + idx_part.size(), index);
      const auto value = colon == std::string_view::npos ? std::nullopt : parse_double(tok.substr(colon + 1));
      if (colon == std::string_view::npos || ec != std::errc() || ptr != idx_part.data() + idx_part.size() ||
          index == 0 || !value)
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_no) + ": malformed feature '" + std::string(tok) + "'");
      if (index <= last_index)
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": indices must increase");
      last_index = index;
      if (ex.features.size() < index) ex.features.resize(index, 0.0);
      ex.features[index - 1] = *value;
    }
    ds.dim = std::max(ds.dim, ex.features.size());
    ds.examples.push_back(std::move(ex));
  }
  finish(ds, opts);
  return ds;
}

Dataset parse_dense_csv(std::istream& in, std::string_view label_column, std::size_t task, const ParseOptions& opts,
                        std::string name) {
  Dataset ds;
  ds.name = std::move(name);
  ds.tasks = task + 1;
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_record(line);
    if (!fields) throw Error(ErrorCode::ParseError, "row 1: unterminated quote in header");
    header = std::move(*fields);
  }
  if (header.empty()) throw Error(ErrorCode::ParseError, "missing header row");
  const auto label_it = std::find_if(header.begin(), header.end(),
                                     [&](const std::string& h) { return detail::trim(h) == label_column; });
  if (label_it == header.end())
    throw Error(ErrorCode::ParseError, "label column '" + std::string(label_column) + "' not in header");
  const auto label_idx = static_cast<std::size_t>(label_it - header.begin());
  ds.dim = header.size() - 1;

  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_record(line);
    if (!fields) throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": unterminated quote");
    if (fields->size() != header.size())
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": expected " +
                                             std::to_string(header.size()) + " cells, got " +
                                             std::to_string(fields->size()));
    TaskExample ex{task, {}, 1};
    ex.features.reserve(ds.dim);
    for (std::size_t c = 0; c < fields->size(); ++c) {
      const auto v = parse_double((*fields)[c]);
      if (!v)
        throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ", col " + std::to_string(c + 1) +
                                               ": non-numeric cell '" + (*fields)[c] + "'");
      if (c == label_idx) {
        ex.label = map_label(*v, row);
      } else {
        ex.features.push_back(*v);
      }
    }
    ds.examples.push_back(std::move(ex));
  }
  finish(ds, opts);
  return ds;
}

void write_sparse(std::ostream& out, const Dataset& ds) {
  for (const auto& ex : ds.examples) {
    out << (ex.label > 0 ? "+1" : "-1");
    for (std::size_t i = 0; i < ex.features.size(); ++i)
      if (ex.features[i] != 0.0) out << ' ' << (i + 1) << ':' << detail::format_double(ex.features[i]);
    out << '\n';
  }
}

void pad_to(Dataset& ds, std::size_t dim) {
  if (dim <= ds.dim) return;
  ds.dim = dim;
  for (auto& ex : ds.examples) ex.features.resize(dim, 0.0);
}

Dataset merge_tasks(std::vector<TaskPart> parts) {
  Dataset merged;
  merged.tasks = parts.size();
  merged.dim = 0;
  for (const auto& p : parts) {
    merged.dim = std::max(merged.dim, p.data.dim);
    if (!merged.name.empty() && !p.data.name.empty()) merged.name += "+";
    merged.name += p.data.name;
  }
  for (auto& p : parts) {
    if (p.task >= merged.tasks)
      throw Error(ErrorCode::UnknownTask,
                  "task index " + std::to_string(p.task) + " with " + std::to_string(merged.tasks) + " parts");
    for (auto& ex : p.data.examples) {
      ex.task = p.task;
      ex.features.resize(merged.dim, 0.0);
      merged.examples.push_back(std::move(ex));
    }
  }
  return merged;
}

Dataset filter_task(const Dataset& ds, std::size_t task) {
  Dataset out{ds.name, ds.tasks, ds.dim, {}};
  std::copy_if(ds.examples.begin(), ds.examples.end(), std::back_inserter(out.examples),
               [task](const TaskExample& ex) { return ex.task == task; });
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t permutation_stream_seed(const PermutationSeed& p) { return splitmix64(p.seed ^ splitmix64(p.index)); }

std::vector<std::size_t> permutation_order(std::size_t n, const PermutationSeed& seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 gen(permutation_stream_seed(seed));
  for (std::size_t i = n; i > 1; --i) {
    const std::uint64_t range = i;
    const std::uint64_t threshold = (0 - range) % range;
    std::uint64_t u = gen();
    while (u < threshold) u = gen();
    std::swap(order[i - 1], order[static_cast<std::size_t>(u % range)]);
  }
  return order;
}

Dataset permute(const Dataset& ds, const PermutationSeed& seed) {
  Dataset out{ds.name, ds.tasks, ds.dim, {}};
  out.examples.reserve(ds.size());
  for (std::size_t i : permutation_order(ds.size(), seed)) out.examples.push_back(ds.examples[i]);
  return out;
}

}  // namespace omtl
