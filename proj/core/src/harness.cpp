#include "omtl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "csv.hpp"
#include "omtl/error.hpp"
#include "omtl/log.hpp"

namespace omtl {

namespace {

// Portable draws: the standard distributions are implementation-defined,
// so uniforms and normals are built directly on mt19937_64 output.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    cached_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::vector<double> unit_vector(std::size_t d) {
    std::vector<double> v(d);
    do {
      for (double& x : v) x = normal();
    } while (!normalize_l2(v));
    return v;
  }

 private:
  std::mt19937_64 gen_;
  bool cached_ = false;
  double spare_ = 0.0;
};

std::vector<std::vector<double>> true_weights(SynthRng& rng, const SynthParams& p) {
  const std::vector<double> shared = rng.unit_vector(p.dim);
  std::vector<std::vector<double>> w;
  w.reserve(p.tasks);
  for (std::size_t k = 0; k < p.tasks; ++k) {
    std::vector<double> own = rng.unit_vector(p.dim);
    for (std::size_t i = 0; i < p.dim; ++i) own[i] = p.relatedness * shared[i] + (1.0 - p.relatedness) * own[i];
    // r * shared + (1 - r) * own can only vanish for r = 1/2 and own = -shared.
    if (!normalize_l2(own)) own = shared;
    w.push_back(std::move(own));
  }
  return w;
}

LearnerConfig learner_config(const Dataset& ds, const CellSpec& cell) {
  LearnerConfig cfg;
  cfg.method = cell.method;
  cfg.eta = cell.eta;
  cfg.epoch_fraction = cell.epoch;
  cfg.ridge = cell.ridge;
  cfg.tasks = ds.tasks;
  cfg.dim = ds.dim;
  cfg.von_neumann_inverse = cell.von_neumann_inverse;
  return cfg;
}

PermutationOutcome run_permutation(const Dataset& train, const LearnerConfig& cfg, EvalMode mode,
                                   const std::vector<std::size_t>& order, const Dataset* test, std::size_t p) {
  PermutationOutcome out;
  out.permutation = p;
  try {
    const StreamResult r = run_stream(train.examples, order, cfg);
    out.post_gate_error = r.post_gate_error_rate();
    if (mode == EvalMode::Split) {
      std::size_t wrong = 0;
      for (const auto& ex : test->examples)
        if (predict(r.state, ex) != ex.label) ++wrong;
      out.error = test->empty() ? 0.0 : static_cast<double>(wrong) / static_cast<double>(test->size());
    } else {
      out.error = r.error_rate();
    }
    out.ok = true;
  } catch (const Error& e) {
    out.failure = e.what();
  }
  return out;
}

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return std::max<std::size_t>(1, std::min(n, jobs));
}

// Runs job(i) for i in [0, n) on a small pool; each job writes its own slot.
template <class Job>
void parallel_for(std::size_t n, std::size_t threads, Job&& job) {
  const std::size_t workers = worker_count(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) job(i);
    });
}

Aggregate summarize(const std::vector<double>& v) {
  if (v.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  return aggregate(v);
}

std::string fmt(double v) { return detail::format_double(v); }

std::string percent(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (methods.empty()) throw Error(ErrorCode::ConfigError, "no methods selected");
  if (epochs.empty()) throw Error(ErrorCode::ConfigError, "no epoch values");
  if (etas.empty()) throw Error(ErrorCode::ConfigError, "no eta values");
  if (permutations < 1) throw Error(ErrorCode::ConfigError, "permutations must be >= 1");
  for (double e : epochs)
    if (!(e >= 0.0 && e <= 1.0)) throw Error(ErrorCode::ConfigError, "epoch " + fmt(e) + " outside [0, 1]");
  for (double eta : etas)
    if (!(eta > 0.0)) throw Error(ErrorCode::ConfigError, "eta " + fmt(eta) + " must be positive");
  if (!(ridge >= 0.0)) throw Error(ErrorCode::ConfigError, "ridge must be nonnegative");
}

std::vector<PermutationOutcome> run_cell(const Dataset& train, const CellSpec& cell, std::size_t permutations,
                                         std::uint64_t seed, const Dataset* test) {
  if (train.empty()) throw Error(ErrorCode::EmptyCell, "dataset '" + train.name + "' is empty");
  if (cell.mode == EvalMode::Split && test == nullptr)
    throw Error(ErrorCode::ConfigError, "split mode needs a test set");
  const LearnerConfig cfg = learner_config(train, cell);
  cfg.validate();
  std::vector<PermutationOutcome> out;
  out.reserve(permutations);
  for (std::size_t p = 0; p < permutations; ++p)
    out.push_back(run_permutation(train, cfg, cell.mode, permutation_order(train.size(), {seed, p}), test, p));
  return out;
}

Aggregate aggregate(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyCell, "no values to aggregate");
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

std::vector<double> CellReport::errors() const {
  std::vector<double> e;
  for (const auto& o : outcomes)
    if (o.ok) e.push_back(o.error);
  return e;
}

bool ExperimentReport::partial() const {
  return std::any_of(cells.begin(), cells.end(), [](const CellReport& c) { return c.partial; });
}

void ExperimentReport::write_permutation_csv(std::ostream& out) const {
  out << "method,epoch,eta,permutation,error,post_epoch_error\n";
  for (const auto& c : cells)
    for (const auto& o : c.outcomes) {
      out << to_string(c.method) << ',' << fmt(c.epoch) << ',' << fmt(c.eta) << ',' << o.permutation << ',';
      if (o.ok) {
        out << fmt(o.error) << ',' << fmt(o.post_gate_error);
      } else {
        out << "nan,nan";
      }
      out << '\n';
    }
}

void ExperimentReport::write_summary_csv(std::ostream& out) const {
  out << "method,epoch,eta,mean,std\n";
  for (const auto& c : cells)
    out << to_string(c.method) << ',' << fmt(c.epoch) << ',' << fmt(c.eta) << ',' << fmt(c.summary.mean) << ','
        << fmt(c.summary.std) << '\n';
}

void ExperimentReport::write_table(std::ostream& out) const {
  if (!dataset.empty()) out << "dataset: " << dataset << '\n';
  out << std::left << std::setw(10) << "method" << std::right << std::setw(7) << "epoch" << std::setw(8) << "eta"
      << std::setw(20) << "error % (std)" << std::setw(22) << "post-epoch % (std)" << std::setw(7) << "runs"
      << '\n';
  for (const auto& c : cells) {
    const auto ok = c.errors().size();
    out << std::left << std::setw(10) << to_string(c.method) << std::right << std::setw(7) << fmt(c.epoch)
        << std::setw(8) << fmt(c.eta) << std::setw(20)
        << (percent(c.summary.mean) + " (" + percent(c.summary.std) + ")") << std::setw(22)
        << (percent(c.post_gate_summary.mean) + " (" + percent(c.post_gate_summary.std) + ")") << std::setw(7)
        << (std::to_string(ok) + (c.partial ? "*" : "")) << '\n';
  }
  if (partial()) out << "* cell has failed permutations\n";
}

void ExperimentReport::write_plot_csv(std::ostream& out) const {
  std::vector<const CellReport*> sorted;
  for (const auto& c : cells) sorted.push_back(&c);
  std::stable_sort(sorted.begin(), sorted.end(), [](const CellReport* a, const CellReport* b) {
    if (a->method != b->method) return a->method < b->method;
    if (a->eta != b->eta) return a->eta < b->eta;
    return a->epoch < b->epoch;
  });
  out << "method,eta,epoch,mean,std\n";
  for (const auto* c : sorted)
    out << to_string(c->method) << ',' << fmt(c->eta) << ',' << fmt(c->epoch) << ',' << fmt(c->summary.mean) << ','
        << fmt(c->summary.std) << '\n';
}

ExperimentReport epoch_sweep(const Dataset& train, const ExperimentConfig& cfg, const Dataset* test) {
  cfg.validate();
  if (train.empty()) throw Error(ErrorCode::EmptyCell, "dataset '" + train.name + "' is empty");
  if (cfg.mode == EvalMode::Split && test == nullptr) throw Error(ErrorCode::ConfigError, "split mode needs a test set");

  ExperimentReport report;
  report.dataset = train.name;
  std::vector<LearnerConfig> learners;
  for (Method m : cfg.methods)
    for (double epoch : cfg.epochs)
      for (double eta : cfg.etas) {
        CellReport cell;
        cell.method = m;
        cell.epoch = epoch;
        cell.eta = eta;
        cell.outcomes.resize(cfg.permutations);
        report.cells.push_back(std::move(cell));
        learners.push_back(learner_config(train, {m, epoch, eta, cfg.ridge, cfg.von_neumann_inverse, cfg.mode}));
        learners.back().validate();
      }

  std::vector<std::vector<std::size_t>> orders;
  orders.reserve(cfg.permutations);
  for (std::size_t p = 0; p < cfg.permutations; ++p) orders.push_back(permutation_order(train.size(), {cfg.seed, p}));

  const std::size_t jobs = report.cells.size() * cfg.permutations;
  std::vector<double> seconds(jobs, 0.0);
  parallel_for(jobs, cfg.threads, [&](std::size_t job) {
    const std::size_t c = job / cfg.permutations;
    const std::size_t p = job % cfg.permutations;
    const auto start = std::chrono::steady_clock::now();
    report.cells[c].outcomes[p] = run_permutation(train, learners[c], cfg.mode, orders[p], test, p);
    seconds[job] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    auto& cell = report.cells[c];
    std::vector<double> post;
    for (const auto& o : cell.outcomes) {
      if (o.ok) {
        post.push_back(o.post_gate_error);
      } else {
        cell.partial = true;
        log::warn(std::string(to_string(cell.method)) + " epoch=" + fmt(cell.epoch) + " eta=" + fmt(cell.eta) +
                  " permutation " + std::to_string(o.permutation) + " failed: " + o.failure);
      }
    }
    cell.summary = summarize(cell.errors());
    cell.post_gate_summary = summarize(post);
    for (std::size_t p = 0; p < cfg.permutations; ++p) cell.wall_seconds += seconds[c * cfg.permutations + p];
  }
  return report;
}

ExperimentReport read_permutation_csv(std::istream& in) {
  ExperimentReport report;
  std::string line;
  std::size_t row = 0;
  bool header = false;
  std::map<std::tuple<int, double, double>, std::size_t> index;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_record(line);
    if (!fields) throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": unterminated quote");
    if (!header) {
      if (fields->size() < 5 || (*fields)[0] != "method" || (*fields)[4] != "error")
        throw Error(ErrorCode::ParseError, "not a permutation report (header: method,epoch,eta,permutation,error...)");
      header = true;
      continue;
    }
    if (fields->size() < 5) throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": too few cells");
    const auto method = parse_method((*fields)[0]);
    const auto epoch = detail::parse_double((*fields)[1]);
    const auto eta = detail::parse_double((*fields)[2]);
    const auto perm = detail::parse_double((*fields)[3]);
    const auto error = detail::parse_double((*fields)[4]);
    const auto post = fields->size() > 5 ? detail::parse_double((*fields)[5]) : std::optional<double>(0.0);
    if (!method || !epoch || !eta || !perm || !error || !post)
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": malformed cell");
    const auto key = std::make_tuple(static_cast<int>(*method), *epoch, *eta);
    auto [it, inserted] = index.try_emplace(key, report.cells.size());
    if (inserted) {
      CellReport cell;
      cell.method = *method;
      cell.epoch = *epoch;
      cell.eta = *eta;
      report.cells.push_back(std::move(cell));
    }
    PermutationOutcome o;
    o.permutation = static_cast<std::size_t>(*perm);
    o.ok = std::isfinite(*error);
    o.error = *error;
    o.post_gate_error = *post;
    if (!o.ok) o.failure = "failed in source report";
    report.cells[it->second].outcomes.push_back(o);
  }
  if (!header) throw Error(ErrorCode::ParseError, "empty report");
  for (auto& cell : report.cells) {
    std::vector<double> post;
    for (const auto& o : cell.outcomes) {
      if (o.ok) post.push_back(o.post_gate_error);
      else cell.partial = true;
    }
    cell.summary = summarize(cell.errors());
    cell.post_gate_summary = summarize(post);
  }
  return report;
}

std::vector<std::vector<double>> synth_true_weights(const SynthParams& p) {
  SynthRng rng(p.seed);
  return true_weights(rng, p);
}

Dataset synth_related_tasks(const SynthParams& p) {
  if (p.dim < 2) throw Error(ErrorCode::ConfigError, "synthetic data needs dim >= 2");
  if (p.tasks < 1) throw Error(ErrorCode::ConfigError, "synthetic data needs at least one task");
  if (!(p.relatedness >= 0.0 && p.relatedness <= 1.0))
    throw Error(ErrorCode::ConfigError, "relatedness must lie in [0, 1]");
  if (!(p.noise >= 0.0 && p.noise <= 1.0)) throw Error(ErrorCode::ConfigError, "noise must lie in [0, 1]");

  SynthRng rng(p.seed);
  const auto w = true_weights(rng, p);
  Dataset ds;
  ds.name = "synth-k" + std::to_string(p.tasks) + "-d" + std::to_string(p.dim);
  ds.tasks = p.tasks;
  ds.dim = p.dim;
  ds.examples.reserve(p.examples);
  for (std::size_t i = 0; i < p.examples; ++i) {
    const std::size_t task = i % p.tasks;
    std::vector<double> x = rng.unit_vector(p.dim);
    double margin = 0.0;
    for (std::size_t r = 0; r < p.dim; ++r) margin += w[task][r] * x[r];
    int label = margin >= 0.0 ? 1 : -1;
    if (rng.uniform() < p.noise) label = -label;
    ds.examples.push_back({task, std::move(x), label});
  }
  return ds;
}

}  // namespace omtl
