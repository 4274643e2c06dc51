// omtl: command-line front end for the online multi-task perceptron library.
//
//   omtl run CONFIG [--out-dir DIR]      grid of methods x epochs x etas -> report
//   omtl features --recording R.csv --labels L.csv --out F.csv
//   omtl synth --out DIR [generator options]
//   omtl report REPORT.csv [--format table|summary|plot]
//
// Exit codes: 0 success, 1 config error, 2 data error, 3 partial results.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "omtl/config.hpp"
#include "omtl/dataset.hpp"
#include "omtl/eeg.hpp"
#include "omtl/error.hpp"
#include "omtl/harness.hpp"
#include "omtl/log.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kDataError = 2, kPartial = 3 };

int exit_code_for(const omtl::Error& e) {
  switch (e.code()) {
    case omtl::ErrorCode::ConfigError: return kConfigError;
    default: return kDataError;
  }
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw omtl::Error(omtl::ErrorCode::ConfigError, "cannot write " + p.string());
  return out;
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir, std::size_t threads, bool quiet) {
  std::ifstream in(config_path);
  if (!in) throw omtl::Error(omtl::ErrorCode::ConfigError, "cannot open config " + config_path.string());
  omtl::RunConfig cfg = omtl::parse_run_config(in, config_path.parent_path());
  if (threads > 0) cfg.experiment.threads = threads;

  const omtl::LoadedData data = omtl::load_data(cfg.data);
  omtl::log::info("dataset " + data.train.name + ": " + std::to_string(data.train.size()) + " examples, K=" +
                  std::to_string(data.train.tasks) + ", d=" + std::to_string(data.train.dim));
  const omtl::ExperimentReport report =
      omtl::epoch_sweep(data.train, cfg.experiment, data.test ? &*data.test : nullptr);

  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "report.csv");
    report.write_permutation_csv(out);
  }
  {
    auto out = open_out(out_dir / "summary.csv");
    report.write_summary_csv(out);
  }
  {
    auto out = open_out(out_dir / "plot.csv");
    report.write_plot_csv(out);
  }
  if (!quiet) report.write_table(std::cout);
  double seconds = 0.0;
  for (const auto& c : report.cells) seconds += c.wall_seconds;
  omtl::log::info("total compute time " + std::to_string(seconds) + " s");
  return report.partial() ? kPartial : kOk;
}

struct FeatureArgs {
  fs::path recording;
  fs::path labels;
  fs::path out;
  double rate = 128.0;
  std::size_t window = 128;
  std::size_t segment = 128;
  double overlap = 0.5;
  std::string taper = "hamming";
  std::string arousal = "alpha-over-beta";
  std::string valence = "sum";
};

int cmd_features(const FeatureArgs& a) {
  omtl::eeg::FeatureConfig cfg;
  cfg.welch.segment_len = a.segment;
  cfg.welch.overlap = a.overlap;
  cfg.welch.taper = a.taper == "rectangular" ? omtl::eeg::Taper::Rectangular : omtl::eeg::Taper::Hamming;
  cfg.arousal_form =
      a.arousal == "beta-over-alpha" ? omtl::eeg::ArousalForm::BetaOverAlpha : omtl::eeg::ArousalForm::AlphaOverBeta;
  cfg.valence_form = a.valence == "difference" ? omtl::eeg::ValenceForm::Difference : omtl::eeg::ValenceForm::Sum;

  std::ifstream rec_in(a.recording);
  if (!rec_in) throw omtl::Error(omtl::ErrorCode::ParseError, "cannot open " + a.recording.string());
  std::ifstream lab_in(a.labels);
  if (!lab_in) throw omtl::Error(omtl::ErrorCode::ParseError, "cannot open " + a.labels.string());

  const auto recording = omtl::eeg::read_recording_csv(rec_in, a.rate);
  const auto labels = omtl::eeg::read_window_labels(lab_in);
  std::vector<omtl::eeg::SpectralFeatures> features;
  std::size_t flagged = 0;
  for (const auto& w : omtl::eeg::split_windows(recording, a.window)) {
    features.push_back(omtl::eeg::extract_features(w, cfg));
    if (features.back().fea_flagged) ++flagged;
  }
  auto out = open_out(a.out);
  const std::size_t rows = omtl::eeg::write_feature_csv(out, features, labels);
  std::cerr << "wrote " << rows << " feature rows from " << features.size() << " windows";
  if (flagged > 0) std::cerr << " (" << flagged << " with degenerate frontal asymmetry)";
  std::cerr << '\n';
  return kOk;
}

int cmd_synth(const omtl::SynthParams& p, const fs::path& out_dir) {
  const omtl::Dataset ds = omtl::synth_related_tasks(p);
  fs::create_directories(out_dir);
  std::string files;
  for (std::size_t k = 0; k < p.tasks; ++k) {
    const std::string name = "task" + std::to_string(k) + ".svm";
    auto out = open_out(out_dir / name);
    omtl::write_sparse(out, omtl::filter_task(ds, k));
    files += (k ? ", " : "") + name;
  }
  auto cfg = open_out(out_dir / "run.cfg");
  cfg << "# generated by omtl synth\n"
      << "name = " << ds.name << "\n"
      << "data = " << files << "\n"
      << "format = libsvm\n";
  std::cerr << "wrote " << ds.size() << " examples over " << p.tasks << " task files to " << out_dir.string() << '\n';
  return kOk;
}

int cmd_report(const fs::path& path, const std::string& format) {
  std::ifstream in(path);
  if (!in) throw omtl::Error(omtl::ErrorCode::ParseError, "cannot open " + path.string());
  const auto report = omtl::read_permutation_csv(in);
  if (format == "summary") report.write_summary_csv(std::cout);
  else if (format == "plot") report.write_plot_csv(std::cout);
  else report.write_table(std::cout);
  return report.partial() ? kPartial : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online multi-task perceptron with learned task relationships"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  auto* run = app.add_subcommand("run", "Run an experiment grid from a config file");
  fs::path config_path;
  fs::path out_dir = "omtl-out";
  std::size_t threads = 0;
  bool quiet = false;
  run->add_option("config", config_path, "Config file (key = value)")->required();
  run->add_option("-o,--out-dir", out_dir, "Directory for report.csv, summary.csv, plot.csv");
  run->add_option("-j,--threads", threads, "Worker threads (overrides config; 0 = config/auto)");
  run->add_flag("-q,--quiet", quiet, "Do not print the table");

  auto* features = app.add_subcommand("features", "Extract EEG band-power features from a recording CSV");
  FeatureArgs fa;
  features->add_option("-r,--recording", fa.recording, "Samples CSV, header of channel labels")->required();
  features->add_option("-l,--labels", fa.labels, "Sidecar CSV of window_index,label")->required();
  features->add_option("-o,--out", fa.out, "Feature CSV to write")->required();
  features->add_option("--rate", fa.rate, "Sample rate in Hz")->capture_default_str();
  features->add_option("--window", fa.window, "Samples per window")->capture_default_str();
  features->add_option("--segment", fa.segment, "Welch segment length (power of two)")->capture_default_str();
  features->add_option("--overlap", fa.overlap, "Welch segment overlap fraction")->capture_default_str();
  features->add_option("--taper", fa.taper, "hamming or rectangular")
      ->check(CLI::IsMember({"hamming", "rectangular"}))
      ->capture_default_str();
  features->add_option("--arousal", fa.arousal, "alpha-over-beta or beta-over-alpha")
      ->check(CLI::IsMember({"alpha-over-beta", "beta-over-alpha"}))
      ->capture_default_str();
  features->add_option("--valence", fa.valence, "sum or difference")
      ->check(CLI::IsMember({"sum", "difference"}))
      ->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a related-tasks dataset (one libsvm file per task)");
  omtl::SynthParams sp;
  fs::path synth_out;
  synth->add_option("-o,--out-dir", synth_out, "Output directory")->required();
  synth->add_option("--tasks", sp.tasks, "Number of tasks")->capture_default_str();
  synth->add_option("--dim", sp.dim, "Feature dimension")->capture_default_str();
  synth->add_option("--examples", sp.examples, "Total examples")->capture_default_str();
  synth->add_option("--relatedness", sp.relatedness, "Weight of the shared direction in [0, 1]")
      ->capture_default_str();
  synth->add_option("--noise", sp.noise, "Label flip probability")->capture_default_str();
  synth->add_option("--seed", sp.seed, "Generator seed")->capture_default_str();

  auto* report = app.add_subcommand("report", "Summarize a permutation report CSV");
  fs::path report_path;
  std::string format = "table";
  report->add_option("report", report_path, "report.csv written by 'omtl run'")->required();
  report->add_option("-f,--format", format, "table, summary or plot")
      ->check(CLI::IsMember({"table", "summary", "plot"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  omtl::log::set_level(verbose ? omtl::log::Level::Info : omtl::log::Level::Warn);

  try {
    if (*run) return cmd_run(config_path, out_dir, threads, quiet);
    if (*features) return cmd_features(fa);
    if (*synth) return cmd_synth(sp, synth_out);
    if (*report) return cmd_report(report_path, format);
  } catch (const omtl::Error& e) {
    std::cerr << "omtl: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "omtl: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}
