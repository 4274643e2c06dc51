#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "omtl/dataset.hpp"
#include "omtl/harness.hpp"

namespace omtl {

enum class DataFormat { Libsvm, Csv };

/// Where the examples come from. Each file in `train_files` is one task
/// (task index = position). With no files, a synthetic set is generated.
struct DataSource {
  std::string name;
  std::vector<std::filesystem::path> train_files;
  std::vector<std::filesystem::path> test_files;  // Split mode, one per task
  DataFormat format = DataFormat::Libsvm;
  std::string label_column = "label";
  SynthParams synth{};
};

struct RunConfig {
  ExperimentConfig experiment{};
  DataSource data{};
};

/// Flat "key = value" text; '#' starts a comment; lists are comma separated.
/// Unknown keys and malformed values throw ConfigError naming the line.
/// Relative paths resolve against `base_dir`.
///
///   name, data, test_data, format (libsvm|csv), label_column,
///   mode (stream|split), methods, epochs, etas, permutations, ridge, seed,
///   threads, von_neumann_inverse (true|false),
///   synth.tasks, synth.dim, synth.examples, synth.relatedness, synth.noise, synth.seed
RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir = {});

struct LoadedData {
  Dataset train;
  std::optional<Dataset> test;
};

/// Reads every file (dimension = max over train and test files, so both
/// sides agree) or generates the synthetic set. Throws ParseError/LabelError
/// for bad files.
LoadedData load_data(const DataSource& source);

}  // namespace omtl
