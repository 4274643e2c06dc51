#include "omtl/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <string>

#include "csv.hpp"
#include "omtl/error.hpp"

namespace omtl {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = v.find(',');
    const auto item = detail::trim(v.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

double to_double(std::string_view v, std::size_t line, std::string_view key) {
  const auto d = detail::parse_double(v);
  if (!d) fail(line, std::string(key) + ": '" + std::string(v) + "' is not a number");
  return *d;
}

std::uint64_t to_uint(std::string_view v, std::size_t line, std::string_view key) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    fail(line, std::string(key) + ": '" + std::string(v) + "' is not a nonnegative integer");
  return out;
}

std::vector<double> to_doubles(std::string_view v, std::size_t line, std::string_view key) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(item, line, key));
  if (out.empty()) fail(line, std::string(key) + ": empty list");
  return out;
}

bool to_bool(std::string_view v, std::size_t line, std::string_view key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(line, std::string(key) + ": expected true or false");
}

std::vector<std::filesystem::path> to_paths(std::string_view v, const std::filesystem::path& base) {
  std::vector<std::filesystem::path> out;
  for (const auto& item : split_list(v)) {
    std::filesystem::path p(item);
    out.push_back(p.is_absolute() || base.empty() ? p : base / p);
  }
  return out;
}

Dataset read_file(const std::filesystem::path& path, const DataSource& src, std::size_t task) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  try {
    if (src.format == DataFormat::Csv) return parse_dense_csv(in, src.label_column, task, {}, path.filename().string());
    return parse_sparse(in, task, {}, path.filename().string());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Dataset merge_files(const std::vector<std::filesystem::path>& files, const DataSource& src, std::size_t dim) {
  std::vector<TaskPart> parts;
  for (std::size_t t = 0; t < files.size(); ++t) {
    Dataset ds = read_file(files[t], src, t);
    pad_to(ds, dim);
    parts.push_back({std::move(ds), t});
  }
  Dataset merged = merge_tasks(std::move(parts));
  if (!src.name.empty()) merged.name = src.name;
  return merged;
}

}  // namespace

RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  auto& ex = cfg.experiment;
  auto& data = cfg.data;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) fail(line, "expected key = value");
    const std::string key(detail::trim(s.substr(0, eq)));
    const std::string_view value = detail::trim(s.substr(eq + 1));

    if (key == "name") {
      data.name = value;
    } else if (key == "data") {
      data.train_files = to_paths(value, base_dir);
    } else if (key == "test_data") {
      data.test_files = to_paths(value, base_dir);
    } else if (key == "format") {
      if (value == "libsvm") data.format = DataFormat::Libsvm;
      else if (value == "csv") data.format = DataFormat::Csv;
      else fail(line, "format must be libsvm or csv");
    } else if (key == "label_column") {
      data.label_column = value;
    } else if (key == "mode") {
      if (value == "stream") ex.mode = EvalMode::Stream;
      else if (value == "split") ex.mode = EvalMode::Split;
      else fail(line, "mode must be stream or split");
    } else if (key == "methods") {
      ex.methods.clear();
      for (const auto& name : split_list(value)) {
        const auto m = parse_method(name);
        if (!m) fail(line, "unknown method '" + name + "'");
        ex.methods.push_back(*m);
      }
    } else if (key == "epochs") {
      ex.epochs = to_doubles(value, line, key);
    } else if (key == "etas") {
      ex.etas = to_doubles(value, line, key);
    } else if (key == "permutations") {
      ex.permutations = to_uint(value, line, key);
    } else if (key == "ridge") {
      ex.ridge = to_double(value, line, key);
    } else if (key == "seed") {
      ex.seed = to_uint(value, line, key);
    } else if (key == "threads") {
      ex.threads = to_uint(value, line, key);
    } else if (key == "von_neumann_inverse") {
      ex.von_neumann_inverse = to_bool(value, line, key);
    } else if (key == "synth.tasks") {
      data.synth.tasks = to_uint(value, line, key);
    } else if (key == "synth.dim") {
      data.synth.dim = to_uint(value, line, key);
    } else if (key == "synth.examples") {
      data.synth.examples = to_uint(value, line, key);
    } else if (key == "synth.relatedness") {
      data.synth.relatedness = to_double(value, line, key);
    } else if (key == "synth.noise") {
      data.synth.noise = to_double(value, line, key);
    } else if (key == "synth.seed") {
      data.synth.seed = to_uint(value, line, key);
    } else {
      fail(line, "unknown key '" + key + "'");
    }
  }
  try {
    ex.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  if (ex.mode == EvalMode::Split && data.test_files.empty())
    throw Error(ErrorCode::ConfigError, "mode = split needs test_data");
  if (!data.test_files.empty() && data.test_files.size() != data.train_files.size())
    throw Error(ErrorCode::ConfigError, "test_data needs one file per task, like data");
  return cfg;
}

LoadedData load_data(const DataSource& source) {
  LoadedData out;
  if (source.train_files.empty()) {
    out.train = synth_related_tasks(source.synth);
    if (!source.name.empty()) out.train.name = source.name;
    return out;
  }
  // Size every file first so train and test share one dimension.
  std::size_t dim = 0;
  std::vector<std::filesystem::path> all = source.train_files;
  all.insert(all.end(), source.test_files.begin(), source.test_files.end());
  for (const auto& f : all) dim = std::max(dim, read_file(f, source, 0).dim);
  out.train = merge_files(source.train_files, source, dim);
  if (!source.test_files.empty()) out.test = merge_files(source.test_files, source, dim);
  return out;
}

}  // namespace omtl
