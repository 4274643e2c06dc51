#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace omtl::eeg {

enum class Taper { Hamming, Rectangular };

/// Defaults follow the usual pwelch conventions.
struct WelchOptions {
  std::size_t segment_len = 128;  // power of two
  double overlap = 0.5;           // fraction in [0, 1)
  Taper taper = Taper::Hamming;
};

/// One-sided power spectral density; power[i] is at frequency[i].
struct Spectrum {
  std::vector<double> frequency;
  std::vector<double> power;
};

/// Averaged modified periodogram. Segment k starts at k * (L - floor(overlap * L));
/// each is tapered, transformed, scaled by 1 / (fs * sum(w^2)), and bins
/// other than DC and Nyquist are doubled. Bin i is at i * fs / L.
/// Throws InvalidSegment if L exceeds the signal or is not a power of two.
Spectrum welch_psd(std::span<const double> samples, double sample_rate, const WelchOptions& opts = {});

struct BandSpec {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

inline constexpr BandSpec kAlphaBand{8.0, 12.5};
inline constexpr BandSpec kBetaBand{12.5, 30.0};

/// Mean |power| over bins with low <= f <= high; 0 (logged) when no bin
/// falls inside. Throws InvalidSpectrum on an empty spectrum.
double band_mean(const Spectrum& spectrum, BandSpec band);

/// Mean |power| over every bin.
double spectrum_mean(const Spectrum& spectrum);

/// Per-channel band means keyed by electrode label.
using ChannelValues = std::map<std::string, double>;

enum class ArousalForm {
  AlphaOverBeta,  // sum(alpha) / sum(beta) over AF3, AF4, F3, F4 (default)
  BetaOverAlpha,
};

enum class ValenceForm {
  Sum,         // alpha(F4)/beta(F4) + alpha(F3)/beta(F3) (default)
  Difference,  // alpha(F4)/beta(F4) - alpha(F3)/beta(F3)
};

/// Throws MissingChannel if a frontal channel is absent, DegenerateBand on a
/// zero denominator.
double arousal(const ChannelValues& alpha, const ChannelValues& beta, ArousalForm form = ArousalForm::AlphaOverBeta);
double valence(const ChannelValues& alpha, const ChannelValues& beta, ValenceForm form = ValenceForm::Sum);

struct SignalWindow {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> channels;  // channels[c] pairs with labels[c]
  double sample_rate = 128.0;
};

struct FeatureConfig {
  WelchOptions welch{};
  BandSpec alpha = kAlphaBand;
  BandSpec beta = kBetaBand;
  ArousalForm arousal_form = ArousalForm::AlphaOverBeta;
  ValenceForm valence_form = ValenceForm::Sum;
};

struct SpectralFeatures {
  std::vector<std::string> labels;
  std::vector<double> psd_mean;
  std::vector<double> alpha_mean;
  std::vector<double> beta_mean;
  std::optional<double> arousal;
  std::optional<double> valence;
  /// Frontal channels exist but arousal/valence could not be formed.
  bool fea_flagged = false;

  /// [psd_mean per channel][alpha per channel][beta per channel][arousal, valence].
  /// FEA entries appear only when both are present.
  std::vector<double> flatten() const;
  /// Column names matching flatten(): psd_<ch>, alpha_<ch>, beta_<ch>, arousal, valence.
  std::vector<std::string> names() const;
};

/// True when AF3, AF4, F3 and F4 are all among the labels.
bool has_frontal_channels(std::span<const std::string> labels);

SpectralFeatures extract_features(const SignalWindow& window, const FeatureConfig& cfg = {});

/// A full multichannel recording (one CSV file).
struct Recording {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> channels;
  double sample_rate = 128.0;

  std::size_t samples() const { return channels.empty() ? 0 : channels.front().size(); }
};

/// One row per sample, header row of channel labels. Throws ParseError.
Recording read_recording_csv(std::istream& in, double sample_rate = 128.0);

/// Non-overlapping consecutive windows; a trailing partial block is dropped.
std::vector<SignalWindow> split_windows(const Recording& rec, std::size_t window_size = 128);

/// Sidecar of (window_index, label) rows with a header line.
std::map<std::size_t, int> read_window_labels(std::istream& in);

/// Header = feature names + "label"; one row per labeled window. Windows
/// without a label are dropped. Windows with a flagged FEA get 0 in the
/// arousal/valence columns when other windows carry them.
/// Returns the number of rows written.
std::size_t write_feature_csv(std::ostream& out, const std::vector<SpectralFeatures>& features,
                              const std::map<std::size_t, int>& labels);

}  // namespace omtl::eeg
