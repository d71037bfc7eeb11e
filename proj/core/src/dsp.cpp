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

#include "probekit/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "probekit/errors.hpp"
#include "probekit/fft.hpp"
#include "probekit/log.hpp"
#include "probekit/resample.hpp"
#include "probekit/rng.hpp"

namespace probekit::dsp {

double default_log_floor() {
  static const double value = std::log(1e-10);
  return value;
}

MelConfig::MelConfig() : log_floor(default_log_floor()) {}

int MelConfig::window_samples() const {
  return static_cast<int>(std::lround(window_length * kCanonicalSampleRate));
}

void MelConfig::validate() const {
  if (n_mels < 1) {
    throw InvalidConfig("n_mels must be >= 1");
  }
  if (frame_rate <= 0 || kCanonicalSampleRate % frame_rate != 0) {
    throw InvalidConfig("frame_rate must be a positive divisor of 16000");
  }
  if (!(window_length > 0.0) || window_samples() < 1) {
    throw InvalidConfig("window_length must cover at least one sample");
  }
  if (fmin < 0.0 || !std::isfinite(fmin)) {
    throw InvalidConfig("fmin must be finite and >= 0");
  }
  const double hi = effective_fmax();
  if (!std::isfinite(hi) || hi <= fmin) {
    throw InvalidConfig("fmax must be finite and > fmin");
  }
  if (hi > kCanonicalSampleRate / 2.0) {
    throw InvalidConfig("fmax exceeds the Nyquist frequency of the 16 kHz frontend");
  }
  if (!std::isfinite(log_floor)) {
    throw InvalidConfig("log_floor must be finite");
  }
}

void MaskSpec::validate() const {
  if (max_freq_bins < 0 || n_freq_masks < 0 || n_time_masks < 0) {
    throw InvalidConfig("mask counts must be >= 0");
  }
  if (!(max_time_seconds >= 0.0) || !std::isfinite(max_time_seconds)) {
    throw InvalidConfig("max_time_seconds must be finite and >= 0");
  }
}

double hz_to_mel(double hz) {
  constexpr double f_sp = 200.0 / 3.0;
  constexpr double min_log_hz = 1000.0;
  constexpr double min_log_mel = min_log_hz / f_sp;
  const double logstep = std::log(6.4) / 27.0;
  if (hz < min_log_hz) {
    return hz / f_sp;
  }
  return min_log_mel + std::log(hz / min_log_hz) / logstep;
}

double mel_to_hz(double mel) {
  constexpr double f_sp = 200.0 / 3.0;
  constexpr double min_log_hz = 1000.0;
  constexpr double min_log_mel = min_log_hz / f_sp;
  const double logstep = std::log(6.4) / 27.0;
  if (mel < min_log_mel) {
    return mel * f_sp;
  }
  return min_log_hz * std::exp(logstep * (mel - min_log_mel));
}

MelFilterbank::MelFilterbank(int n_mels, std::size_t n_fft, int sample_rate,
                             double fmin, double fmax)
    : n_mels_(n_mels) {
  if (n_mels < 1) {
    throw InvalidConfig("filterbank needs at least one mel band");
  }
  if (sample_rate <= 0) {
    throw InvalidConfig("filterbank sample rate must be positive");
  }
  if (!(fmin >= 0.0) || !(fmax > fmin)) {
    throw InvalidConfig("filterbank requires 0 <= fmin < fmax");
  }

  const double mel_lo = hz_to_mel(fmin);
  const double mel_hi = hz_to_mel(fmax);
  edges_hz_.resize(static_cast<std::size_t>(n_mels) + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    const double mel =
        mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / (n_mels + 1);
    edges_hz_[static_cast<std::size_t>(i)] = mel_to_hz(mel);
  }

  const std::size_t n_bins = n_fft / 2 + 1;
  weights_ = Matrix(static_cast<std::size_t>(n_mels), n_bins);
  for (int m = 0; m < n_mels; ++m) {
    const double left = edges_hz_[static_cast<std::size_t>(m)];
    const double center = edges_hz_[static_cast<std::size_t>(m) + 1];
    const double right = edges_hz_[static_cast<std::size_t>(m) + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
      const double rising = (f - left) / (center - left);
      const double falling = (right - f) / (right - center);
      weights_.at(static_cast<std::size_t>(m), k) =
          std::max(0.0, std::min(rising, falling));
    }
  }
}

void MelFilterbank::apply(std::span<const double> power,
                          std::span<double> mel_out) const {
  if (power.size() != weights_.cols || mel_out.size() != weights_.rows) {
    throw DimMismatch("filterbank input/output sizes do not match");
  }
  for (std::size_t m = 0; m < weights_.rows; ++m) {
    const std::span<const double> w = weights_.row(m);
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      acc += w[k] * power[k];
    }
    mel_out[m] = acc;
  }
}

LogMelSpectrogram compute_logmel(const AudioClip& clip, const MelConfig& cfg) {
  cfg.validate();
  if (clip.samples.empty()) {
    throw EmptyInput("audio clip '" + clip.id + "' has no samples");
  }
  if (clip.sample_rate <= 0) {
    throw InvalidConfig("audio clip sample rate must be positive");
  }
  for (const double s : clip.samples) {
    if (!std::isfinite(s)) {
      throw DomainError("audio clip '" + clip.id + "' contains a non-finite sample");
    }
  }

  // Frame count comes from the clip's own duration: T = ceil(duration * rate),
  // evaluated in integer arithmetic to dodge rounding at exact boundaries.
  const std::int64_t n_orig = static_cast<std::int64_t>(clip.samples.size());
  const std::int64_t frames =
      (n_orig * cfg.frame_rate + clip.sample_rate - 1) / clip.sample_rate;

  std::vector<double> resampled;
  std::span<const double> signal(clip.samples);
  if (clip.sample_rate != kCanonicalSampleRate) {
    PK_DEBUG("resampling clip '%s' from %d Hz", clip.id.c_str(), clip.sample_rate);
    resampled = resample(signal, clip.sample_rate, kCanonicalSampleRate);
    signal = resampled;
  }

  const int hop = cfg.hop_samples();
  const int win = cfg.window_samples();
  const std::size_t n_fft = std::max<std::size_t>(
      2, next_pow2(static_cast<std::size_t>(win)));
  Fft fft(n_fft);
  MelFilterbank bank(cfg.n_mels, n_fft, kCanonicalSampleRate, cfg.fmin,
                     cfg.effective_fmax());

  // Periodic Hann window, the STFT-analysis variant.
  std::vector<double> window(static_cast<std::size_t>(win));
  for (int i = 0; i < win; ++i) {
    window[static_cast<std::size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / win);
  }

  LogMelSpectrogram out;
  out.values = Matrix(static_cast<std::size_t>(frames),
                      static_cast<std::size_t>(cfg.n_mels));
  out.frame_rate = cfg.frame_rate;
  out.log_floor = cfg.log_floor;
  out.clip_id = clip.id;

  std::vector<double> frame(static_cast<std::size_t>(win));
  std::vector<double> power(fft.n_bins());
  std::vector<double> mel(static_cast<std::size_t>(cfg.n_mels));
  const std::int64_t n_signal = static_cast<std::int64_t>(signal.size());
  for (std::int64_t t = 0; t < frames; ++t) {
    const std::int64_t start = t * hop;
    for (int i = 0; i < win; ++i) {
      const std::int64_t idx = start + i;
      frame[static_cast<std::size_t>(i)] =
          idx < n_signal ? signal[static_cast<std::size_t>(idx)] *
                               window[static_cast<std::size_t>(i)]
                         : 0.0;
    }
    fft.power_spectrum(frame, power);
    bank.apply(power, mel);
    for (int m = 0; m < cfg.n_mels; ++m) {
      const double e = mel[static_cast<std::size_t>(m)];
      out.values.at(static_cast<std::size_t>(t), static_cast<std::size_t>(m)) =
          e > 0.0 ? std::max(std::log(e), cfg.log_floor) : cfg.log_floor;
    }
  }
  return out;
}

MaskPlan draw_mask_plan(const LogMelSpectrogram& spec, const MaskSpec& mask,
                        std::uint64_t seed) {
  mask.validate();
  const std::size_t n_frames = spec.n_frames();
  const std::size_t n_mels = spec.n_mels();

  MaskPlan plan;
  if (mask.fill == MaskFill::kLogFloor) {
    plan.fill_value = spec.log_floor;
  } else {
    CompensatedSum sum;
    for (const double v : spec.values.data) {
      sum.add(v);
    }
    const std::size_t n = spec.values.data.size();
    plan.fill_value = n > 0 ? sum.value() / static_cast<double>(n) : spec.log_floor;
  }

  Rng rng = make_rng(seed);
  // Frequency masks first, then time masks; each mask draws width then offset.
  for (int i = 0; i < mask.n_freq_masks; ++i) {
    const std::uint64_t max_w =
        std::min<std::uint64_t>(static_cast<std::uint64_t>(mask.max_freq_bins), n_mels);
    const std::uint64_t width = next_int(rng, 0, max_w);
    const std::uint64_t start = next_int(rng, 0, n_mels - width);
    MaskRect rect;
    rect.t0 = 0;
    rect.t1 = n_frames;
    rect.f0 = static_cast<std::size_t>(start);
    rect.f1 = static_cast<std::size_t>(start + width);
    plan.rects.push_back(rect);
  }
  const double max_t_real = mask.max_time_seconds * spec.frame_rate;
  const std::uint64_t max_t_cfg =
      static_cast<std::uint64_t>(std::floor(max_t_real + 1e-9));
  for (int i = 0; i < mask.n_time_masks; ++i) {
    const std::uint64_t max_w = std::min<std::uint64_t>(max_t_cfg, n_frames);
    const std::uint64_t width = next_int(rng, 0, max_w);
    const std::uint64_t start = next_int(rng, 0, n_frames - width);
    MaskRect rect;
    rect.t0 = static_cast<std::size_t>(start);
    rect.t1 = static_cast<std::size_t>(start + width);
    rect.f0 = 0;
    rect.f1 = n_mels;
    plan.rects.push_back(rect);
  }
  return plan;
}

LogMelSpectrogram apply_mask_plan(const LogMelSpectrogram& spec, const MaskPlan& plan) {
  LogMelSpectrogram out = spec;
  for (const MaskRect& rect : plan.rects) {
    if (rect.empty()) continue;
    if (rect.t1 > out.n_frames() || rect.f1 > out.n_mels()) {
      throw ShapeError("mask rectangle lies outside the spectrogram");
    }
    for (std::size_t t = rect.t0; t < rect.t1; ++t) {
      for (std::size_t f = rect.f0; f < rect.f1; ++f) {
        out.values.at(t, f) = plan.fill_value;
      }
    }
  }
  return out;
}

LogMelSpectrogram spec_augment(const LogMelSpectrogram& spec, const MaskSpec& mask,
                               std::uint64_t seed) {
  return apply_mask_plan(spec, draw_mask_plan(spec, mask, seed));
}

}  // namespace probekit::dsp
