#pragma once
// MFCC front-end: 13 cepstra with per-utterance CMVN plus first and second
// order regression deltas, giving 39 values per 25 ms frame at a 10 ms shift.

#include <cstddef>
#include <memory>
#include <vector>

#include "vgs/core/matrix.hpp"

namespace vgs::dsp {

inline constexpr std::size_t kNumCeps = 13;
inline constexpr std::size_t kFeatureWidth = 3 * kNumCeps;

struct Waveform {
  std::vector<float> samples;  // [-1, 1]
  int sample_rate = 16000;
};

struct FeatureConfig {
  int sample_rate = 16000;
  double frame_length_ms = 25.0;
  double frame_shift_ms = 10.0;
  double preemphasis = 0.97;
  std::size_t fft_size = 512;
  std::size_t num_mel_bins = 40;
  double low_freq = 0.0;
  double high_freq = 8000.0;
  double log_floor = 1e-10;
  double variance_floor = 1e-8;
  int delta_window = 2;

  std::size_t frame_samples() const;
  std::size_t shift_samples() const;
  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
};

/// Frames-by-39 feature matrix for one utterance.
struct AudioFeatures {
  Matrix<float> frames;
  double frame_length_ms = 25.0;
  double frame_shift_ms = 10.0;

  std::size_t num_frames() const { return frames.rows(); }
};

/// 1 + floor((num_samples - frame) / shift); zero when shorter than a frame.
std::size_t num_frames(std::size_t num_samples, const FeatureConfig& cfg);

/// Per-column mean removal and division by the population standard
/// deviation. Columns whose std falls below variance_floor are only centered.
Matrix<double> cmvn(const Matrix<double>& seq, double variance_floor = 1e-8);

/// Regression deltas over +-window frames, replicating edge frames.
Matrix<double> deltas(const Matrix<double>& seq, int window = 2);

/// Holds the precomputed window, filterbank, DCT matrix and FFT plan for one
/// configuration. Extraction is const and safe to call concurrently.
class MfccExtractor {
 public:
  explicit MfccExtractor(FeatureConfig cfg = {});
  ~MfccExtractor();
  MfccExtractor(MfccExtractor&&) noexcept;
  MfccExtractor& operator=(MfccExtractor&&) noexcept;

  const FeatureConfig& config() const { return cfg_; }

  /// Raw cepstra (T x 13) before normalization.
  Matrix<double> cepstra(const Waveform& wav) const;
  /// Full pipeline: cepstra -> CMVN -> delta -> delta-delta.
  AudioFeatures extract(const Waveform& wav) const;

  const Matrix<double>& mel_filterbank() const { return mel_; }
  const Matrix<double>& dct_matrix() const { return dct_; }

 private:
  struct FftPlan;

  FeatureConfig cfg_;
  std::vector<double> window_;
  Matrix<double> mel_;  // num_mel_bins x (fft_size/2 + 1)
  Matrix<double> dct_;  // 13 x num_mel_bins
  std::unique_ptr<FftPlan> plan_;
};

AudioFeatures extract_features(const Waveform& wav, const FeatureConfig& cfg = {});

/// HTK mel scale.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

}  // namespace vgs::dsp
