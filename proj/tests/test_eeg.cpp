#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "omtl/eeg.hpp"
#include "omtl/error.hpp"
#include "oracles.hpp"

using namespace omtl;
using namespace omtl::eeg;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected omtl::Error");
  return ErrorCode::ConfigError;
}

std::vector<double> sine(double hz, std::size_t n, double fs = 128.0, double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t)
    x[t] = amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(t) / fs + phase);
  return x;
}

std::vector<double> add(std::vector<double> a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

const std::vector<std::string> kEmotiv = {"AF3", "F7", "F3", "FC5", "T7", "P7", "O1",
                                          "O2",  "P8", "T8", "FC6", "F4", "F8", "AF4"};

SignalWindow emotiv_window(std::mt19937_64& rng) {
  SignalWindow w;
  w.labels = kEmotiv;
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t c = 0; c < kEmotiv.size(); ++c) {
    auto x = add(sine(9.0 + static_cast<double>(c % 3), 128, 128.0, 2.0), sine(20.0, 128));
    for (double& v : x) v += 0.3 * g(rng);
    w.channels.push_back(std::move(x));
  }
  return w;
}

Spectrum flat(double c, std::size_t bins = 65, double fs = 128.0) {
  Spectrum s;
  for (std::size_t i = 0; i < bins; ++i) {
    s.frequency.push_back(static_cast<double>(i) * fs / 128.0);
    s.power.push_back(c);
  }
  return s;
}

}  // namespace

TEST_SUITE("eeg") {
  TEST_CASE("16 Hz sine peaks at its bin, 20 dB over distant bins") {
    const auto x = sine(16.0, 128);
    const auto s = welch_psd(x, 128.0, {128, 0.0, Taper::Rectangular});
    REQUIRE(s.power.size() == 65);
    CHECK(s.frequency[16] == 16.0);
    std::size_t peak = 0;
    for (std::size_t i = 0; i < s.power.size(); ++i)
      if (s.power[i] > s.power[peak]) peak = i;
    CHECK(peak == 16);
    for (std::size_t i = 0; i < s.power.size(); ++i) {
      if (i + 3 > 16 && i < 16 + 3) continue;
      CHECK(10.0 * std::log10(s.power[16] / std::max(s.power[i], 1e-300)) >= 20.0);
    }
    // Same peak in the direct DFT.
    const auto ref = oracle::direct_periodogram(x, 128.0);
    CHECK(std::abs(ref[16] - s.power[16]) <= 1e-9 * ref[16]);
  }

  TEST_CASE("zero signal gives a zero spectrum") {
    const std::vector<double> x(256, 0.0);
    for (Taper t : {Taper::Hamming, Taper::Rectangular}) {
      const auto s = welch_psd(x, 128.0, {128, 0.5, t});
      for (double p : s.power) CHECK(p == 0.0);
    }
  }

  TEST_CASE("white noise: integrated PSD matches time-domain variance within 10%") {
    std::mt19937_64 rng(97);
    std::normal_distribution<double> g(0.0, 1.5);
    std::vector<double> x(8192);
    for (double& v : x) v = g(rng);
    double var = 0.0;
    for (double v : x) var += v * v;
    var /= static_cast<double>(x.size());
    for (Taper t : {Taper::Hamming, Taper::Rectangular}) {
      const auto s = welch_psd(x, 128.0, {128, 0.5, t});
      const double df = s.frequency[1] - s.frequency[0];
      double total = 0.0;
      for (double p : s.power) total += p * df;
      CHECK(std::abs(total - var) <= 0.1 * var);
    }
  }

  TEST_CASE("one rectangular full-length segment equals the direct periodogram") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (std::size_t n : {8u, 64u, 128u, 256u}) {
      std::vector<double> x(n);
      for (double& v : x) v = u(rng);
      const auto s = welch_psd(x, 128.0, {n, 0.0, Taper::Rectangular});
      const auto ref = oracle::direct_periodogram(x, 128.0);
      REQUIRE(s.power.size() == ref.size());
      for (std::size_t k = 0; k < ref.size(); ++k) {
        CHECK(std::abs(s.power[k] - ref[k]) <= 1e-9 * std::max(1.0, ref[k]));
        CHECK(s.frequency[k] == doctest::Approx(static_cast<double>(k) * 128.0 / static_cast<double>(n)));
      }
    }
  }

  TEST_CASE("welch_psd rejects bad segments") {
    const std::vector<double> x(100, 1.0);
    CHECK(code_of([&] { welch_psd(x, 128.0, {128, 0.5, Taper::Hamming}); }) == ErrorCode::InvalidSegment);
    CHECK(code_of([&] { welch_psd(x, 128.0, {48, 0.5, Taper::Hamming}); }) == ErrorCode::InvalidSegment);
    CHECK(code_of([&] { welch_psd(x, 128.0, {64, 1.0, Taper::Hamming}); }) == ErrorCode::InvalidSegment);
    CHECK(code_of([&] { welch_psd(x, 0.0, {64, 0.5, Taper::Hamming}); }) == ErrorCode::InvalidSegment);
  }

  TEST_CASE("powers are nonnegative") {
    std::mt19937_64 rng(103);
    std::normal_distribution<double> g;
    std::vector<double> x(512);
    for (double& v : x) v = g(rng);
    for (double p : welch_psd(x, 128.0).power) CHECK(p >= 0.0);
  }

  TEST_CASE("band_mean examples") {
    CHECK(band_mean(flat(3.5), kAlphaBand) == 3.5);
    CHECK(band_mean(flat(3.5), kBetaBand) == 3.5);

    Spectrum spike = flat(0.0);
    spike.power[16] = 7.0;
    CHECK(band_mean(spike, kAlphaBand) == 0.0);
    // Beta 12.5..30 at 1 Hz spacing holds bins 13..30.
    CHECK(band_mean(spike, kBetaBand) == doctest::Approx(7.0 / 18.0));

    // Edges are inclusive: alpha at 1 Hz spacing holds bins 8..12.
    Spectrum ramp = flat(0.0);
    for (std::size_t i = 0; i < ramp.power.size(); ++i) ramp.power[i] = static_cast<double>(i);
    CHECK(band_mean(ramp, kAlphaBand) == doctest::Approx(10.0));
    CHECK(band_mean(ramp, {8.0, 8.0}) == 8.0);

    // No bin inside the band.
    CHECK(band_mean(flat(1.0, 65, 128.0), {8.2, 8.7}) == 0.0);

    CHECK(code_of([] { band_mean(Spectrum{}, kAlphaBand); }) == ErrorCode::InvalidSpectrum);
  }

  TEST_CASE("alpha-dominant signal has alpha_mean > beta_mean") {
    const auto x = add(sine(10.0, 128), sine(20.0, 128, 128.0, 0.1));
    for (Taper t : {Taper::Hamming, Taper::Rectangular}) {
      const auto s = welch_psd(x, 128.0, {128, 0.5, t});
      CHECK(band_mean(s, kAlphaBand) > band_mean(s, kBetaBand));
    }
    // Same ordering through the independent DFT.
    const auto ref = oracle::direct_periodogram(x, 128.0);
    double a = 0.0, b = 0.0;
    for (std::size_t k = 8; k <= 12; ++k) a += ref[k] / 5.0;
    for (std::size_t k = 13; k <= 30; ++k) b += ref[k] / 18.0;
    CHECK(a > b);
    CHECK(band_mean(welch_psd(x, 128.0, {128, 0.0, Taper::Rectangular}), kAlphaBand) ==
          doctest::Approx(a).epsilon(1e-9));
  }

  TEST_CASE("arousal examples") {
    const ChannelValues c{{"AF3", 2.0}, {"AF4", 2.0}, {"F3", 2.0}, {"F4", 2.0}};
    CHECK(arousal(c, c) == 1.0);
    const ChannelValues a{{"AF3", 0.5}, {"AF4", 0.5}, {"F3", 0.5}, {"F4", 0.5}, {"O1", 9.0}};
    const ChannelValues b{{"AF3", 1.0}, {"AF4", 1.0}, {"F3", 1.0}, {"F4", 1.0}, {"O1", 1.0}};
    CHECK(arousal(a, b) == 0.5);
    CHECK(arousal(a, b, ArousalForm::BetaOverAlpha) == 2.0);

    ChannelValues missing = c;
    missing.erase("F3");
    CHECK(code_of([&] { arousal(missing, c); }) == ErrorCode::MissingChannel);
    const ChannelValues zero{{"AF3", 0.0}, {"AF4", 0.0}, {"F3", 0.0}, {"F4", 0.0}};
    CHECK(code_of([&] { arousal(c, zero); }) == ErrorCode::DegenerateBand);
  }

  TEST_CASE("valence examples") {
    const ChannelValues one{{"F3", 3.0}, {"F4", 3.0}};
    CHECK(valence(one, one) == 2.0);
    const ChannelValues a{{"F3", 0.25}, {"F4", 0.5}};
    const ChannelValues b{{"F3", 1.0}, {"F4", 1.0}};
    CHECK(valence(a, b) == 0.75);
    CHECK(valence(a, b, ValenceForm::Difference) == 0.25);

    const ChannelValues zero_f4{{"F3", 1.0}, {"F4", 0.0}};
    CHECK(code_of([&] { valence(a, zero_f4); }) == ErrorCode::DegenerateBand);
    CHECK(code_of([&] { valence(ChannelValues{{"F4", 1.0}}, b); }) == ErrorCode::MissingChannel);
  }

  TEST_CASE("14-channel window gives 44 features in documented order") {
    std::mt19937_64 rng(107);
    const auto w = emotiv_window(rng);
    const auto f = extract_features(w);
    const auto v = f.flatten();
    CHECK(v.size() == 44);
    const auto names = f.names();
    REQUIRE(names.size() == 44);
    CHECK(names[0] == "psd_AF3");
    CHECK(names[14] == "alpha_AF3");
    CHECK(names[28] == "beta_AF3");
    CHECK(names[42] == "arousal");
    CHECK(names[43] == "valence");
    CHECK(v[14] == f.alpha_mean[0]);
    CHECK(v[43] == *f.valence);
    for (double x : v) CHECK(std::isfinite(x));
    for (double x : f.alpha_mean) CHECK(x >= 0.0);
    for (double x : f.beta_mean) CHECK(x >= 0.0);
    CHECK(extract_features(w).flatten() == v);
    CHECK_FALSE(f.fea_flagged);
  }

  TEST_CASE("zero signal: zero band features, FEA omitted and flagged") {
    SignalWindow w;
    w.labels = kEmotiv;
    w.channels.assign(14, std::vector<double>(128, 0.0));
    const auto f = extract_features(w);
    for (double x : f.psd_mean) CHECK(x == 0.0);
    for (double x : f.alpha_mean) CHECK(x == 0.0);
    for (double x : f.beta_mean) CHECK(x == 0.0);
    CHECK_FALSE(f.arousal.has_value());
    CHECK_FALSE(f.valence.has_value());
    CHECK(f.fea_flagged);
    CHECK(f.flatten().size() == 42);
  }

  TEST_CASE("no frontal channels: no FEA, not flagged") {
    SignalWindow w;
    w.labels = {"O1", "O2"};
    w.channels = {sine(10.0, 128), sine(20.0, 128)};
    const auto f = extract_features(w);
    CHECK(f.flatten().size() == 6);
    CHECK_FALSE(f.fea_flagged);
    CHECK_FALSE(has_frontal_channels(w.labels));
    CHECK(has_frontal_channels(kEmotiv));
  }

  TEST_CASE("replicated 16 Hz channel gives identical per-channel features") {
    SignalWindow w;
    w.labels = kEmotiv;
    w.channels.assign(14, sine(16.0, 128));
    const auto f = extract_features(w);
    for (std::size_t c = 1; c < 14; ++c) {
      CHECK(f.psd_mean[c] == f.psd_mean[0]);
      CHECK(f.alpha_mean[c] == f.alpha_mean[0]);
      CHECK(f.beta_mean[c] == f.beta_mean[0]);
    }
    REQUIRE(f.arousal.has_value());
    CHECK(*f.arousal == doctest::Approx(f.alpha_mean[0] / f.beta_mean[0]));
    CHECK(*f.valence == doctest::Approx(2.0 * f.alpha_mean[0] / f.beta_mean[0]));
  }

  TEST_CASE("scale equivariance: c^2 on band features, ratios unchanged") {
    std::mt19937_64 rng(109);
    const auto w = emotiv_window(rng);
    const auto f = extract_features(w);
    for (double c : {0.1, 3.0, 250.0}) {
      SignalWindow s = w;
      for (auto& ch : s.channels)
        for (double& v : ch) v *= c;
      const auto g = extract_features(s);
      for (std::size_t i = 0; i < 14; ++i) {
        CHECK(std::abs(g.psd_mean[i] - c * c * f.psd_mean[i]) <= 1e-9 * c * c * f.psd_mean[i]);
        CHECK(std::abs(g.alpha_mean[i] - c * c * f.alpha_mean[i]) <= 1e-9 * c * c * f.alpha_mean[i]);
        CHECK(std::abs(g.beta_mean[i] - c * c * f.beta_mean[i]) <= 1e-9 * c * c * f.beta_mean[i]);
      }
      CHECK(std::abs(*g.arousal - *f.arousal) <= 1e-9 * std::abs(*f.arousal));
      CHECK(std::abs(*g.valence - *f.valence) <= 1e-9 * std::abs(*f.valence));
    }
  }

  TEST_CASE("shifting a periodic signal by whole periods keeps band means") {
    // Period 16 samples (8 Hz and 16 Hz at 128 Hz share it).
    const auto long_x = add(sine(8.0, 512, 128.0, 1.0, 0.3), sine(16.0, 512, 128.0, 0.5, 1.1));
    const std::span<const double> all(long_x);
    const auto base = welch_psd(all.subspan(0, 256), 128.0);
    for (std::size_t periods : {1u, 3u, 10u}) {
      const auto shifted = welch_psd(all.subspan(16 * periods, 256), 128.0);
      for (BandSpec b : {kAlphaBand, kBetaBand}) {
        const double m0 = band_mean(base, b), m1 = band_mean(shifted, b);
        CHECK(std::abs(m1 - m0) <= 1e-6 * std::max(std::abs(m0), 1e-300));
      }
    }
  }

  TEST_CASE("recording CSV, windows, labels and feature CSV") {
    std::ostringstream rec;
    rec << "AF3,F3,F4,AF4\n";
    std::mt19937_64 rng(113);
    std::normal_distribution<double> g;
    for (int t = 0; t < 300; ++t) rec << g(rng) << ',' << g(rng) << ',' << g(rng) << ',' << g(rng) << '\n';
    std::istringstream rin(rec.str());
    const auto r = read_recording_csv(rin);
    CHECK(r.labels == std::vector<std::string>{"AF3", "F3", "F4", "AF4"});
    CHECK(r.samples() == 300);
    const auto windows = split_windows(r, 128);
    CHECK(windows.size() == 2);

    std::istringstream lin("window_index,label\n0,1\n1,-1\n");
    const auto labels = read_window_labels(lin);
    CHECK(labels.at(0) == 1);
    CHECK(labels.at(1) == -1);

    std::vector<SpectralFeatures> feats;
    for (const auto& w : windows) feats.push_back(extract_features(w));
    std::ostringstream out;
    CHECK(write_feature_csv(out, feats, {{1, -1}}) == 1);
    std::istringstream check(out.str());
    std::string header, row, extra;
    std::getline(check, header);
    std::getline(check, row);
    CHECK_FALSE(std::getline(check, extra));
    CHECK(header.rfind("psd_AF3,", 0) == 0);
    CHECK(header.size() >= 6);
    CHECK(header.substr(header.size() - 6) == ",label");
    CHECK(row.substr(row.size() - 3) == ",-1");

    std::istringstream ragged("A,B\n1,2\n3\n");
    CHECK(code_of([&] { read_recording_csv(ragged); }) == ErrorCode::ParseError);
    std::istringstream bad("A,B\n1,x\n");
    CHECK(code_of([&] { read_recording_csv(bad); }) == ErrorCode::ParseError);
    std::istringstream bad_labels("window_index,label\n0,yes\n");
    CHECK(code_of([&] { read_window_labels(bad_labels); }) == ErrorCode::ParseError);
  }
}
