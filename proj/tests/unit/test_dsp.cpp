#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles/mfcc_oracle.hpp"
#include "support/signals.hpp"
#include "vgs/dsp/features.hpp"
#include "vgs/dsp/resample.hpp"

using namespace vgs;
using dsp::FeatureConfig;

namespace {

double relative_error(const Matrix<double>& got, const oracle::Rows& ref) {
  long double worst = 0, scale = 0;
  for (std::size_t t = 0; t < ref.size(); ++t) {
    for (std::size_t c = 0; c < ref[t].size(); ++c) {
      worst = std::max(worst, std::abs(static_cast<long double>(got(t, c)) - ref[t][c]));
      scale = std::max(scale, std::abs(ref[t][c]));
    }
  }
  return static_cast<double>(worst / scale);
}

Matrix<double> rows_to_matrix(const oracle::Rows& rows) {
  Matrix<double> m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = static_cast<double>(rows[r][c]);
  return m;
}

dsp::Waveform wave(std::vector<float> s, int rate = 16000) { return {std::move(s), rate}; }

}  // namespace

TEST_SUITE("dsp") {
  TEST_CASE("one second at 16 kHz gives 98 frames of width 39") {
    const FeatureConfig cfg;
    CHECK(cfg.frame_samples() == 400);
    CHECK(cfg.shift_samples() == 160);
    CHECK(dsp::num_frames(16000, cfg) == 98);
    const auto signals = testing::fixed_signals();
    std::vector<float> second(16000);
    for (std::size_t i = 0; i < second.size(); ++i) second[i] = signals[0].samples[i % signals[0].samples.size()];
    const auto f = dsp::extract_features(wave(second));
    CHECK(f.num_frames() == 98);
    CHECK(f.frames.cols() == 39);
    for (const auto& s : signals) {
      const auto g = dsp::extract_features(wave(s.samples));
      CHECK(g.frames.cols() == 39);
      CHECK(g.num_frames() == dsp::num_frames(s.samples.size(), cfg));
    }
  }

  TEST_CASE("raw cepstra and full features match the long-double reference") {
    const dsp::MfccExtractor ex;
    for (const auto& s : testing::fixed_signals()) {
      CAPTURE(s.name);
      const std::vector<double> x(s.samples.begin(), s.samples.end());
      const oracle::MfccSettings settings;
      const auto ref = oracle::mfcc_cepstra(x, settings);
      const auto got = ex.cepstra(wave(s.samples));
      REQUIRE(got.rows() == ref.size());
      CHECK(relative_error(got, ref) < 1e-4);
      const auto full_ref = oracle::mfcc_features(x, settings);
      CHECK(relative_error(ex.extract(wave(s.samples)).frames.cast<double>(), full_ref) < 1e-4);
    }
  }

  TEST_CASE("cmvn examples") {
    const Matrix<double> col(3, 1, std::vector<double>{1, 2, 3});
    const auto out = dsp::cmvn(col, 1e-8);
    CHECK(out(0, 0) == doctest::Approx(-1.224744871391589).epsilon(1e-12));
    CHECK(out(1, 0) == 0.0);
    CHECK(out(2, 0) == doctest::Approx(1.224744871391589).epsilon(1e-12));

    const Matrix<double> constant(7, 3, 4.25);
    const auto centred = dsp::cmvn(constant, 1e-8);
    for (double v : centred.storage()) CHECK(v == 0.0);

    vgs::Rng rng(3);
    const auto random = testing::random_matrix<double>(50, 13, rng, 3.0);
    const auto norm = dsp::cmvn(random, 1e-8);
    for (std::size_t c = 0; c < 13; ++c) {
      double mean = 0, var = 0;
      for (std::size_t r = 0; r < 50; ++r) mean += norm(r, c) / 50;
      for (std::size_t r = 0; r < 50; ++r) var += (norm(r, c) - mean) * (norm(r, c) - mean) / 50;
      CHECK(std::abs(mean) < 1e-6);
      CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-6);
    }
  }

  TEST_CASE("delta examples and reference") {
    const Matrix<double> constant(9, 4, -2.0);
    const auto flat = dsp::deltas(constant, 2);
    for (double v : flat.storage()) CHECK(v == 0.0);

    Matrix<double> ramp(12, 3);
    for (std::size_t t = 0; t < 12; ++t)
      for (std::size_t c = 0; c < 3; ++c) ramp(t, c) = 0.5 * static_cast<double>(c + 1) * static_cast<double>(t) - 1;
    const auto d = dsp::deltas(ramp, 2);
    for (std::size_t t = 2; t + 2 < 12; ++t)
      for (std::size_t c = 0; c < 3; ++c) CHECK(d(t, c) == doctest::Approx(0.5 * (c + 1)).epsilon(1e-12));

    vgs::Rng rng(10);
    const auto x = testing::random_matrix<double>(10, 13, rng);
    oracle::Rows rows(10, std::vector<long double>(13));
    for (std::size_t t = 0; t < 10; ++t)
      for (std::size_t c = 0; c < 13; ++c) rows[t][c] = x(t, c);
    const auto ref = oracle::regression_deltas(rows, 2);
    const auto got = dsp::deltas(x, 2);
    for (std::size_t t = 0; t < 10; ++t)
      for (std::size_t c = 0; c < 13; ++c) CHECK(std::abs(got(t, c) - static_cast<double>(ref[t][c])) < 1e-8);
    CHECK(rows_to_matrix(ref).rows() == 10);
  }

  TEST_CASE("silence gives constant cepstra and therefore zero features") {
    const auto f = dsp::extract_features(wave(std::vector<float>(4000, 0.0f)));
    for (float v : f.frames.storage()) CHECK(v == 0.0f);
  }

  TEST_CASE("one extra shift of leading silence adds exactly one frame") {
    for (const auto& s : testing::fixed_signals()) {
      std::vector<float> shifted(160, 0.0f);
      shifted.insert(shifted.end(), s.samples.begin(), s.samples.end());
      const auto a = dsp::extract_features(wave(s.samples));
      const auto b = dsp::extract_features(wave(shifted));
      CHECK(b.num_frames() == a.num_frames() + 1);
    }
  }

  TEST_CASE("extraction is deterministic") {
    const auto s = testing::fixed_signals()[3].samples;
    const auto a = dsp::extract_features(wave(s));
    const auto b = dsp::extract_features(wave(s));
    CHECK(a.frames == b.frames);
  }

  TEST_CASE("non-canonical rates are resampled before framing") {
    std::vector<float> s(44100);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<float>(0.2 * std::sin(0.05 * i));
    const auto f = dsp::extract_features(wave(s, 44100));
    CHECK(f.num_frames() == 98);
  }

  TEST_CASE("bad input is rejected") {
    CHECK_THROWS_AS(dsp::extract_features(wave(std::vector<float>(399, 0.1f))), std::invalid_argument);
    CHECK_THROWS_AS(dsp::extract_features(wave({})), std::invalid_argument);
    std::vector<float> bad(1000, 0.1f);
    bad[500] = std::numeric_limits<float>::quiet_NaN();
    CHECK_THROWS_AS(dsp::extract_features(wave(bad)), std::invalid_argument);
    FeatureConfig cfg;
    cfg.fft_size = 300;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.high_freq = 9000;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }

  TEST_CASE("mel scale round-trips and the filterbank is a partition") {
    for (double hz : {0.0, 100.0, 1000.0, 8000.0}) CHECK(dsp::mel_to_hz(dsp::hz_to_mel(hz)) == doctest::Approx(hz));
    CHECK(dsp::hz_to_mel(1000.0) == doctest::Approx(1000.0).epsilon(1e-3));
    const dsp::MfccExtractor ex;
    const auto& mel = ex.mel_filterbank();
    CHECK(mel.rows() == 40);
    CHECK(mel.cols() == 257);
    for (std::size_t m = 0; m < mel.rows(); ++m) {
      double peak = 0;
      for (std::size_t k = 0; k < mel.cols(); ++k) {
        CHECK(mel(m, k) >= 0.0);
        peak = std::max(peak, mel(m, k));
      }
      CHECK(peak > 0.0);
      CHECK(peak <= 1.0);
    }
    const auto& dct = ex.dct_matrix();
    for (std::size_t a = 0; a < 13; ++a) {
      for (std::size_t b = 0; b < 13; ++b) {
        double s = 0;
        for (std::size_t m = 0; m < 40; ++m) s += dct(a, m) * dct(b, m);
        CHECK(s == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("resampler length contract and passband") {
    CHECK(dsp::resampled_length(44100, 44100, 16000) == 16000);
    for (std::size_t n : {1000u, 44100u, 12345u}) {
      std::vector<float> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<float>(std::sin(2 * std::numbers::pi * 440.0 * i / 44100.0));
      const auto y = dsp::resample(x, 44100, 16000);
      const double expect = 16000.0 / 44100.0 * static_cast<double>(n);
      CHECK(std::abs(static_cast<double>(y.size()) - expect) <= 1.0);
      // A 440 Hz tone survives: compare against the analytic tone away from the edges.
      double worst = 0;
      for (std::size_t i = 200; i + 200 < y.size(); ++i) {
        worst = std::max(worst, std::abs(y[i] - std::sin(2 * std::numbers::pi * 440.0 * i / 16000.0)));
      }
      CHECK(worst < 0.02);
    }
    const std::vector<float> same{0.1f, -0.2f, 0.3f};
    CHECK(dsp::resample(same, 16000, 16000) == same);
  }
}
