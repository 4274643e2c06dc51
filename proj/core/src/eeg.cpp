#include "omtl/eeg.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include "csv.hpp"
#include "omtl/error.hpp"
#include "omtl/log.hpp"

namespace omtl::eeg {

namespace {

constexpr const char* kFrontal[] = {"AF3", "AF4", "F3", "F4"};

// fftw_plan creation is not thread-safe; executing an existing plan on new
// arrays is. Plans are cached per length for the life of the process.
class R2CPlanCache {
 public:
  fftw_plan get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second.get();
    std::vector<double> in(n);
    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(n, PlanPtr(p));
    return p;
  }

 private:
  struct PlanDeleter {
    void operator()(fftw_plan p) const { fftw_destroy_plan(p); }
  };
  using PlanPtr = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

  std::mutex mutex_;
  std::unordered_map<std::size_t, PlanPtr> plans_;
};

R2CPlanCache& plan_cache() {
  static R2CPlanCache cache;
  return cache;
}

std::vector<double> make_taper(Taper taper, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (taper == Taper::Hamming && n > 1) {
    for (std::size_t i = 0; i < n; ++i)
      w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return w;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double lookup(const ChannelValues& values, const char* channel) {
  const auto it = values.find(channel);
  if (it == values.end()) throw Error(ErrorCode::MissingChannel, std::string("channel ") + channel + " missing");
  return it->second;
}

}  // namespace

Spectrum welch_psd(std::span<const double> samples, double sample_rate, const WelchOptions& opts) {
  const std::size_t len = opts.segment_len;
  if (!(sample_rate > 0.0)) throw Error(ErrorCode::InvalidSegment, "sample rate must be positive");
  if (!is_power_of_two(len))
    throw Error(ErrorCode::InvalidSegment, "segment length " + std::to_string(len) + " is not a power of two");
  if (len > samples.size())
    throw Error(ErrorCode::InvalidSegment, "segment length " + std::to_string(len) + " exceeds signal length " +
                                               std::to_string(samples.size()));
  if (!(opts.overlap >= 0.0 && opts.overlap < 1.0))
    throw Error(ErrorCode::InvalidSegment, "overlap must lie in [0, 1)");

  const auto overlap_samples = static_cast<std::size_t>(std::floor(opts.overlap * static_cast<double>(len)));
  const std::size_t hop = len - overlap_samples;
  const std::size_t segments = (samples.size() - len) / hop + 1;
  const std::vector<double> taper = make_taper(opts.taper, len);
  double taper_energy = 0.0;
  for (double w : taper) taper_energy += w * w;

  const std::size_t bins = len / 2 + 1;
  Spectrum out;
  out.power.assign(bins, 0.0);
  out.frequency.resize(bins);
  for (std::size_t k = 0; k < bins; ++k)
    out.frequency[k] = static_cast<double>(k) * sample_rate / static_cast<double>(len);

  fftw_plan plan = plan_cache().get(len);
  std::vector<double> buf(len);
  std::vector<fftw_complex> spec(bins);
  for (std::size_t s = 0; s < segments; ++s) {
    const std::size_t start = s * hop;
    for (std::size_t i = 0; i < len; ++i) buf[i] = samples[start + i] * taper[i];
    fftw_execute_dft_r2c(plan, buf.data(), spec.data());
    for (std::size_t k = 0; k < bins; ++k) out.power[k] += spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
  }

  const double scale = 1.0 / (static_cast<double>(segments) * sample_rate * taper_energy);
  for (std::size_t k = 0; k < bins; ++k) {
    const bool edge = k == 0 || k == len / 2;
    out.power[k] *= scale * (edge ? 1.0 : 2.0);
  }
  return out;
}

double band_mean(const Spectrum& spectrum, BandSpec band) {
  if (spectrum.power.empty() || spectrum.power.size() != spectrum.frequency.size())
    throw Error(ErrorCode::InvalidSpectrum, "empty or inconsistent spectrum");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < spectrum.power.size(); ++k) {
    const double f = spectrum.frequency[k];
    if (f >= band.low_hz && f <= band.high_hz) {
      sum += std::abs(spectrum.power[k]);
      ++count;
    }
  }
  if (count == 0) {
    log::warn("no spectrum bins in band [" + std::to_string(band.low_hz) + ", " + std::to_string(band.high_hz) + "]");
    return 0.0;
  }
  return sum / static_cast<double>(count);
}

double spectrum_mean(const Spectrum& spectrum) {
  if (spectrum.power.empty()) throw Error(ErrorCode::InvalidSpectrum, "empty spectrum");
  double sum = 0.0;
  for (double p : spectrum.power) sum += std::abs(p);
  return sum / static_cast<double>(spectrum.power.size());
}

double arousal(const ChannelValues& alpha, const ChannelValues& beta, ArousalForm form) {
  double a = 0.0;
  double b = 0.0;
  for (const char* ch : kFrontal) {
    a += lookup(alpha, ch);
    b += lookup(beta, ch);
  }
  const double num = form == ArousalForm::AlphaOverBeta ? a : b;
  const double den = form == ArousalForm::AlphaOverBeta ? b : a;
  if (!(den > 0.0)) throw Error(ErrorCode::DegenerateBand, "arousal denominator is zero");
  return num / den;
}

double valence(const ChannelValues& alpha, const ChannelValues& beta, ValenceForm form) {
  const double b4 = lookup(beta, "F4");
  const double b3 = lookup(beta, "F3");
  const double a4 = lookup(alpha, "F4");
  const double a3 = lookup(alpha, "F3");
  if (!(b4 > 0.0) || !(b3 > 0.0)) throw Error(ErrorCode::DegenerateBand, "valence needs positive beta at F3 and F4");
  return form == ValenceForm::Sum ? a4 / b4 + a3 / b3 : a4 / b4 - a3 / b3;
}

bool has_frontal_channels(std::span<const std::string> labels) {
  return std::all_of(std::begin(kFrontal), std::end(kFrontal), [&](const char* ch) {
    return std::find(labels.begin(), labels.end(), ch) != labels.end();
  });
}

std::vector<double> SpectralFeatures::flatten() const {
  std::vector<double> v;
  v.reserve(3 * labels.size() + 2);
  v.insert(v.end(), psd_mean.begin(), psd_mean.end());
  v.insert(v.end(), alpha_mean.begin(), alpha_mean.end());
  v.insert(v.end(), beta_mean.begin(), beta_mean.end());
  if (arousal && valence) {
    v.push_back(*arousal);
    v.push_back(*valence);
  }
  return v;
}

std::vector<std::string> SpectralFeatures::names() const {
  std::vector<std::string> n;
  n.reserve(3 * labels.size() + 2);
  for (const char* prefix : {"psd_", "alpha_", "beta_"})
    for (const auto& l : labels) n.push_back(prefix + l);
  if (arousal && valence) {
    n.emplace_back("arousal");
    n.emplace_back("valence");
  }
  return n;
}

SpectralFeatures extract_features(const SignalWindow& window, const FeatureConfig& cfg) {
  if (window.labels.size() != window.channels.size())
    throw Error(ErrorCode::InvalidSegment, "channel labels and series disagree");
  if (!(window.sample_rate > 0.0)) throw Error(ErrorCode::InvalidSegment, "sample rate must be positive");
  for (const auto& ch : window.channels)
    if (ch.size() != window.channels.front().size())
      throw Error(ErrorCode::InvalidSegment, "channels differ in length");

  SpectralFeatures f;
  f.labels = window.labels;
  ChannelValues alpha;
  ChannelValues beta;
  for (std::size_t c = 0; c < window.channels.size(); ++c) {
    const Spectrum s = welch_psd(window.channels[c], window.sample_rate, cfg.welch);
    f.psd_mean.push_back(spectrum_mean(s));
    f.alpha_mean.push_back(band_mean(s, cfg.alpha));
    f.beta_mean.push_back(band_mean(s, cfg.beta));
    alpha[window.labels[c]] = f.alpha_mean.back();
    beta[window.labels[c]] = f.beta_mean.back();
  }
  if (has_frontal_channels(window.labels)) {
    try {
      f.arousal = arousal(alpha, beta, cfg.arousal_form);
      f.valence = valence(alpha, beta, cfg.valence_form);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateBand) throw;
      f.arousal.reset();
      f.valence.reset();
      f.fea_flagged = true;
      log::warn(std::string("frontal asymmetry features dropped: ") + e.what());
    }
  }
  return f;
}

Recording read_recording_csv(std::istream& in, double sample_rate) {
  Recording rec;
  rec.sample_rate = sample_rate;
  std::string line;
  std::size_t row = 0;
  while (rec.labels.empty() && std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_record(line);
    if (!fields) throw Error(ErrorCode::ParseError, "unterminated quote in header");
    for (auto& f : *fields) rec.labels.emplace_back(detail::trim(f));
  }
  if (rec.labels.empty()) throw Error(ErrorCode::ParseError, "missing header row");
  rec.channels.resize(rec.labels.size());
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_record(line);
    if (!fields || fields->size() != rec.labels.size())
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": expected " +
                                             std::to_string(rec.labels.size()) + " cells");
    for (std::size_t c = 0; c < fields->size(); ++c) {
      const auto v = detail::parse_double((*fields)[c]);
      if (!v)
        throw Error(ErrorCode::ParseError,
                    "row " + std::to_string(row) + ", col " + std::to_string(c + 1) + ": non-numeric cell");
      rec.channels[c].push_back(*v);
    }
  }
  return rec;
}

std::vector<SignalWindow> split_windows(const Recording& rec, std::size_t window_size) {
  if (window_size == 0) throw Error(ErrorCode::InvalidSegment, "window size must be positive");
  std::vector<SignalWindow> windows;
  const std::size_t count = rec.samples() / window_size;
  windows.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    SignalWindow win{rec.labels, {}, rec.sample_rate};
    win.channels.reserve(rec.channels.size());
    const auto first = static_cast<std::ptrdiff_t>(w * window_size);
    for (const auto& ch : rec.channels)
      win.channels.emplace_back(ch.begin() + first, ch.begin() + first + static_cast<std::ptrdiff_t>(window_size));
    windows.push_back(std::move(win));
  }
  if (rec.samples() % window_size != 0)
    log::info("dropped " + std::to_string(rec.samples() % window_size) + " trailing samples");
  return windows;
}

std::map<std::size_t, int> read_window_labels(std::istream& in) {
  std::map<std::size_t, int> labels;
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    auto fields = detail::split_csv_record(line);
    if (!fields || fields->size() != 2)
      throw Error(ErrorCode::ParseError, "label row " + std::to_string(row) + ": expected window_index,label");
    const auto idx = detail::parse_double((*fields)[0]);
    const auto lab = detail::parse_double((*fields)[1]);
    if (!idx || !lab || *idx < 0 || std::floor(*idx) != *idx || std::floor(*lab) != *lab)
      throw Error(ErrorCode::ParseError, "label row " + std::to_string(row) + ": non-integer cell");
    labels[static_cast<std::size_t>(*idx)] = static_cast<int>(*lab);
  }
  return labels;
}

std::size_t write_feature_csv(std::ostream& out, const std::vector<SpectralFeatures>& features,
                              const std::map<std::size_t, int>& labels) {
  if (features.empty()) return 0;
  const bool with_fea = has_frontal_channels(features.front().labels);
  SpectralFeatures layout = features.front();
  if (with_fea) {
    layout.arousal = 0.0;
    layout.valence = 0.0;
  }
  const auto names = layout.names();
  for (const auto& n : names) out << detail::quote_csv(n) << ',';
  out << "label\n";

  std::size_t written = 0;
  for (std::size_t w = 0; w < features.size(); ++w) {
    const auto lab = labels.find(w);
    if (lab == labels.end()) continue;
    SpectralFeatures row = features[w];
    if (with_fea && !(row.arousal && row.valence)) {
      row.arousal = 0.0;
      row.valence = 0.0;
    }
    for (double v : row.flatten()) out << detail::format_double(v) << ',';
    out << lab->second << '\n';
    ++written;
  }
  if (written < features.size())
    log::info("dropped " + std::to_string(features.size() - written) + " windows without labels");
  return written;
}

}  // namespace omtl::eeg
