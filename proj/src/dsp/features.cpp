#include "vgs/dsp/features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "vgs/dsp/resample.hpp"
#include "vgs/simd/kernels.hpp"

namespace vgs::dsp {

namespace {

// FFTW's planner is not reentrant; execution with new-array execute is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct MfccExtractor::FftPlan {
  explicit FftPlan(std::size_t n) : size(n) {
    std::vector<double> in(n);
    std::vector<std::complex<double>> out(n / 2 + 1);
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("failed to create FFT plan");
  }
  ~FftPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void execute(std::vector<double>& in, std::vector<std::complex<double>>& out) const {
    fftw_execute_dft_r2c(plan, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  }

  std::size_t size;
  fftw_plan plan = nullptr;
};

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::size_t FeatureConfig::frame_samples() const {
  return static_cast<std::size_t>(std::lround(sample_rate * frame_length_ms / 1000.0));
}

std::size_t FeatureConfig::shift_samples() const {
  return static_cast<std::size_t>(std::lround(sample_rate * frame_shift_ms / 1000.0));
}

void FeatureConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("feature config: " + what); };
  if (sample_rate <= 0) fail("sample_rate must be positive");
  if (frame_samples() == 0) fail("frame_length_ms gives an empty frame");
  if (shift_samples() == 0) fail("frame_shift_ms gives a zero shift");
  if (fft_size < frame_samples()) fail("fft_size is smaller than the frame");
  if ((fft_size & (fft_size - 1)) != 0) fail("fft_size must be a power of two");
  if (num_mel_bins < kNumCeps) fail("num_mel_bins must be at least 13");
  if (!(low_freq >= 0.0 && low_freq < high_freq && high_freq <= sample_rate / 2.0))
    fail("mel range must satisfy 0 <= low_freq < high_freq <= sample_rate/2");
  if (!(preemphasis >= 0.0 && preemphasis < 1.0)) fail("preemphasis must lie in [0, 1)");
  if (!(log_floor > 0.0)) fail("log_floor must be positive");
  if (delta_window < 1) fail("delta_window must be >= 1");
}

std::size_t num_frames(std::size_t num_samples, const FeatureConfig& cfg) {
  const std::size_t frame = cfg.frame_samples();
  if (num_samples < frame) return 0;
  return 1 + (num_samples - frame) / cfg.shift_samples();
}

Matrix<double> cmvn(const Matrix<double>& seq, double variance_floor) {
  const std::size_t rows = seq.rows();
  const std::size_t cols = seq.cols();
  Matrix<double> out(rows, cols);
  if (rows == 0) return out;
  for (std::size_t c = 0; c < cols; ++c) {
    // Shifted by the first value so a constant column centres to exact zeros.
    const double origin = seq(0, c);
    double offset = 0.0;
    for (std::size_t r = 0; r < rows; ++r) offset += seq(r, c) - origin;
    const double mean = origin + offset / static_cast<double>(rows);
    double var = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = seq(r, c) - mean;
      var += d * d;
    }
    double stddev = std::sqrt(var / static_cast<double>(rows));
    if (stddev < variance_floor) stddev = 1.0;
    for (std::size_t r = 0; r < rows; ++r) out(r, c) = (seq(r, c) - mean) / stddev;
  }
  return out;
}

Matrix<double> deltas(const Matrix<double>& seq, int window) {
  if (window < 1) throw std::invalid_argument("deltas: window must be >= 1");
  const auto rows = static_cast<std::ptrdiff_t>(seq.rows());
  const std::size_t cols = seq.cols();
  Matrix<double> out(seq.rows(), cols);
  double denom = 0.0;
  for (int n = 1; n <= window; ++n) denom += static_cast<double>(n * n);
  denom *= 2.0;
  auto clamp_row = [rows](std::ptrdiff_t r) { return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(r, 0, rows - 1)); };
  for (std::ptrdiff_t t = 0; t < rows; ++t) {
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int n = 1; n <= window; ++n) {
        acc += n * (seq(clamp_row(t + n), c) - seq(clamp_row(t - n), c));
      }
      out(static_cast<std::size_t>(t), c) = acc / denom;
    }
  }
  return out;
}

MfccExtractor::MfccExtractor(FeatureConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const std::size_t frame = cfg_.frame_samples();
  const std::size_t bins = cfg_.fft_size / 2 + 1;

  // Hamming
  window_.resize(frame);
  for (std::size_t n = 0; n < frame; ++n) {
    window_[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                        static_cast<double>(frame - 1));
  }

  const std::size_t num_mel = cfg_.num_mel_bins;
  const double mel_lo = hz_to_mel(cfg_.low_freq);
  const double mel_hi = hz_to_mel(cfg_.high_freq);
  std::vector<double> edges(num_mel + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(num_mel + 1));
  }
  mel_ = Matrix<double>(num_mel, bins);
  const double bin_hz = static_cast<double>(cfg_.sample_rate) / static_cast<double>(cfg_.fft_size);
  for (std::size_t m = 0; m < num_mel; ++m) {
    const double left = edges[m];
    const double center = edges[m + 1];
    const double right = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = bin_hz * static_cast<double>(k);
      double w = 0.0;
      if (f > left && f < center) {
        w = (f - left) / (center - left);
      } else if (f >= center && f < right) {
        w = (right - f) / (right - center);
      }
      mel_(m, k) = w;
    }
  }

  // Orthonormal DCT-II, first 13 rows.
  dct_ = Matrix<double>(kNumCeps, num_mel);
  const double m_d = static_cast<double>(num_mel);
  for (std::size_t k = 0; k < kNumCeps; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / m_d) : std::sqrt(2.0 / m_d);
    for (std::size_t m = 0; m < num_mel; ++m) {
      dct_(k, m) = scale * std::cos(std::numbers::pi * static_cast<double>(k) *
                                    (static_cast<double>(m) + 0.5) / m_d);
    }
  }

  plan_ = std::make_unique<FftPlan>(cfg_.fft_size);
}

MfccExtractor::~MfccExtractor() = default;
MfccExtractor::MfccExtractor(MfccExtractor&&) noexcept = default;
MfccExtractor& MfccExtractor::operator=(MfccExtractor&&) noexcept = default;

Matrix<double> MfccExtractor::cepstra(const Waveform& input) const {
  if (input.sample_rate <= 0) throw std::invalid_argument("waveform sample rate must be positive");
  if (input.samples.empty()) throw std::invalid_argument("waveform is empty");
  for (std::size_t i = 0; i < input.samples.size(); ++i) {
    if (!std::isfinite(input.samples[i])) {
      throw std::invalid_argument("waveform has a non-finite sample at index " + std::to_string(i));
    }
  }

  std::vector<float> resampled;
  std::span<const float> samples = input.samples;
  if (input.sample_rate != cfg_.sample_rate) {
    resampled = resample(samples, input.sample_rate, cfg_.sample_rate);
    samples = resampled;
  }

  const std::size_t frame = cfg_.frame_samples();
  const std::size_t shift = cfg_.shift_samples();
  const std::size_t count = num_frames(samples.size(), cfg_);
  if (count == 0) {
    throw std::invalid_argument("utterance has " + std::to_string(samples.size()) +
                                " samples, shorter than one " + std::to_string(frame) +
                                "-sample frame");
  }

  std::vector<double> emphasized(samples.size());
  emphasized[0] = samples[0];
  for (std::size_t i = 1; i < samples.size(); ++i) {
    emphasized[i] = static_cast<double>(samples[i]) - cfg_.preemphasis * samples[i - 1];
  }

  const std::size_t bins = cfg_.fft_size / 2 + 1;
  std::vector<double> buffer(cfg_.fft_size);
  std::vector<std::complex<double>> spectrum(bins);
  std::vector<double> power(bins);
  std::vector<double> mel(cfg_.num_mel_bins);
  Matrix<double> out(count, kNumCeps);

  for (std::size_t t = 0; t < count; ++t) {
    std::fill(buffer.begin(), buffer.end(), 0.0);
    const double* src = emphasized.data() + t * shift;
    for (std::size_t n = 0; n < frame; ++n) buffer[n] = src[n] * window_[n];
    plan_->execute(buffer, spectrum);
    for (std::size_t k = 0; k < bins; ++k) power[k] = std::norm(spectrum[k]);
    simd::gemv<double>(mel_.data(), mel_.rows(), mel_.cols(), power, mel);
    for (double& e : mel) e = std::log(std::max(e, cfg_.log_floor));
    simd::gemv<double>(dct_.data(), dct_.rows(), dct_.cols(), mel, out.row(t));
  }
  return out;
}

AudioFeatures MfccExtractor::extract(const Waveform& wav) const {
  const Matrix<double> base = cmvn(cepstra(wav), cfg_.variance_floor);
  const Matrix<double> d1 = deltas(base, cfg_.delta_window);
  const Matrix<double> d2 = deltas(d1, cfg_.delta_window);

  AudioFeatures features;
  features.frame_length_ms = cfg_.frame_length_ms;
  features.frame_shift_ms = cfg_.frame_shift_ms;
  features.frames = Matrix<float>(base.rows(), kFeatureWidth);
  for (std::size_t t = 0; t < base.rows(); ++t) {
    auto row = features.frames.row(t);
    for (std::size_t c = 0; c < kNumCeps; ++c) {
      row[c] = static_cast<float>(base(t, c));
      row[kNumCeps + c] = static_cast<float>(d1(t, c));
      row[2 * kNumCeps + c] = static_cast<float>(d2(t, c));
    }
  }
  return features;
}

AudioFeatures extract_features(const Waveform& wav, const FeatureConfig& cfg) {
  return MfccExtractor(cfg).extract(wav);
}

}  // namespace vgs::dsp
