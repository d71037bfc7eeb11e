/* Copyright 2026 The Probekit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "probekit/numeric.hpp"

namespace probekit::dsp {

// All analysis happens at one canonical rate; arbitrary-rate input is
// resampled first so outputs are reproducible across sources.
inline constexpr int kCanonicalSampleRate = 16000;

// log(1e-10): floor applied to log-energy cells so silence stays finite.
double default_log_floor();

struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string id;

  double duration_seconds() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / static_cast<double>(sample_rate)
               : 0.0;
  }
};

struct MelConfig {
  int n_mels = 64;
  int frame_rate = 40;            // output frames per second
  double window_length = 0.025;   // seconds
  double fmin = 0.0;              // Hz
  double fmax = 0.0;              // Hz; <= 0 means canonical Nyquist
  double log_floor;               // see default_log_floor()

  MelConfig();

  double effective_fmax() const {
    return fmax > 0.0 ? fmax : kCanonicalSampleRate / 2.0;
  }
  int hop_samples() const { return kCanonicalSampleRate / frame_rate; }
  int window_samples() const;

  // Throws InvalidConfig when any invariant is violated.
  void validate() const;
};

struct LogMelSpectrogram {
  Matrix values;  // n_frames x n_mels, log-energy
  int frame_rate = 0;
  double log_floor = 0.0;
  std::string clip_id;

  std::size_t n_frames() const { return values.rows; }
  std::size_t n_mels() const { return values.cols; }
};

enum class MaskFill {
  kLogFloor,       // replace masked cells with the spectrogram's log_floor
  kUtteranceMean,  // replace masked cells with the mean cell of the utterance
};

struct MaskSpec {
  int max_freq_bins = 16;
  double max_time_seconds = 2.0;
  int n_freq_masks = 1;
  int n_time_masks = 1;
  MaskFill fill = MaskFill::kLogFloor;

  void validate() const;
};

// Half-open rectangle of masked cells: frames [t0, t1) x bins [f0, f1).
struct MaskRect {
  std::size_t t0 = 0;
  std::size_t t1 = 0;
  std::size_t f0 = 0;
  std::size_t f1 = 0;

  bool empty() const { return t0 >= t1 || f0 >= f1; }
  std::size_t area() const { return empty() ? 0 : (t1 - t0) * (f1 - f0); }
};

// The masks drawn for one augmentation call, exposed separately from the
// application step so callers can verify exactly which cells may change.
struct MaskPlan {
  std::vector<MaskRect> rects;
  double fill_value = 0.0;
};

// Slaney-style mel scale: linear below 1 kHz, logarithmic above.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Bank of n_mels triangular filters (peak 1, unnormalized) over FFT bins.
class MelFilterbank {
 public:
  MelFilterbank(int n_mels, std::size_t n_fft, int sample_rate, double fmin,
                double fmax);

  int n_mels() const { return n_mels_; }
  std::size_t n_bins() const { return weights_.cols; }
  // n_mels + 2 band edges in Hz, ascending; filter m spans
  // [edges_hz()[m], edges_hz()[m + 2]] and peaks at center_hz(m).
  const std::vector<double>& edges_hz() const { return edges_hz_; }
  double center_hz(int m) const { return edges_hz_[static_cast<std::size_t>(m) + 1]; }
  const Matrix& weights() const { return weights_; }

  // mel_out[m] = sum_k weights(m, k) * power[k].
  void apply(std::span<const double> power, std::span<double> mel_out) const;

 private:
  int n_mels_;
  std::vector<double> edges_hz_;
  Matrix weights_;  // n_mels x n_bins
};

// STFT (periodic Hann, hop = 1/frame_rate) -> power spectrum -> mel
// filterbank -> log with floor. Frame count is ceil(duration * frame_rate),
// taken from the clip's own length and rate before resampling; trailing
// frames are zero-padded.
LogMelSpectrogram compute_logmel(const AudioClip& clip, const MelConfig& cfg);

// Draws the mask rectangles and fill value for `spec_augment` without
// applying them. Widths are uniform over integers [0, max] (clamped to the
// spectrogram dimensions); offsets are uniform over the valid range.
MaskPlan draw_mask_plan(const LogMelSpectrogram& spec, const MaskSpec& mask,
                        std::uint64_t seed);

// Replaces every cell inside the plan's rectangles with the fill value;
// all other cells are bit-identical to the input.
LogMelSpectrogram apply_mask_plan(const LogMelSpectrogram& spec, const MaskPlan& plan);

// draw_mask_plan + apply_mask_plan in one step. Deterministic given seed.
LogMelSpectrogram spec_augment(const LogMelSpectrogram& spec, const MaskSpec& mask,
                               std::uint64_t seed);

}  // namespace probekit::dsp
