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

#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"
#include "probekit/dsp.hpp"
#include "probekit/errors.hpp"
#include "probekit/hash.hpp"
#include "probekit/matrix_io.hpp"
#include "probekit/rng.hpp"
#include "probekit/wav.hpp"

namespace probekit::cli {

namespace {

dsp::MaskFill fill_from_name(const std::string& name) {
  if (name == "logfloor") return dsp::MaskFill::kLogFloor;
  if (name == "mean") return dsp::MaskFill::kUtteranceMean;
  throw InvalidConfig("unknown mask fill '" + name + "' (expected logfloor or mean)");
}

}  // namespace

void run_features(const FeaturesOptions& o) {
  // Validate every flag before touching the filesystem.
  dsp::MelConfig mel;
  mel.n_mels = o.n_mels;
  mel.frame_rate = o.frame_rate;
  mel.window_length = o.window_length;
  mel.fmin = o.fmin;
  mel.fmax = o.fmax;
  mel.validate();

  dsp::MaskSpec mask;
  mask.max_freq_bins = o.mask_freq_bins;
  mask.max_time_seconds = o.mask_time_seconds;
  mask.n_freq_masks = o.n_freq_masks;
  mask.n_time_masks = o.n_time_masks;
  mask.fill = fill_from_name(o.mask_fill);
  mask.validate();
  if (o.jobs < 0) throw InvalidConfig("--jobs must be >= 0");

  const std::filesystem::path in_dir(o.input_dir);
  const std::filesystem::path out_dir(o.out_dir);
  const std::vector<std::filesystem::path> wavs = list_files_sorted(in_dir, ".wav");
  if (wavs.empty()) {
    throw InvalidConfig("no .wav files found in '" + in_dir.string() + "'");
  }
  std::set<std::string> stems;
  for (const auto& path : wavs) {
    if (!stems.insert(path.stem().string()).second) {
      throw InvalidConfig("duplicate clip id '" + path.stem().string() +
                          "' in '" + in_dir.string() + "'");
    }
  }
  ensure_out_dir(out_dir);

  // One matrix file per clip; the per-clip mask seed is derived from the
  // clip id so results do not depend on file order or worker count.
  const std::vector<std::string> errors =
      run_parallel(wavs.size(), o.jobs, [&](std::size_t i) {
        const std::string clip_id = wavs[i].stem().string();
        const wav::WavData audio = wav::read(wavs[i].string());
        dsp::AudioClip clip{std::move(audio.samples), audio.sample_rate, clip_id};
        dsp::LogMelSpectrogram spec = dsp::compute_logmel(clip, mel);
        if (o.augment) {
          spec = dsp::spec_augment(spec, mask, derive_seed(o.seed, fnv1a64(clip_id)));
        }
        store::FrameMatrix out{std::move(spec.values), spec.frame_rate, clip_id};
        store::write_frame_matrix(out_dir / (clip_id + ".amat"), out);
      });

  std::size_t failed = 0;
  for (std::size_t i = 0; i < wavs.size(); ++i) {
    if (!errors[i].empty()) {
      ++failed;
      std::fprintf(stderr, "warning: %s: %s\n",
                   wavs[i].filename().string().c_str(), errors[i].c_str());
    }
  }
  if (failed == wavs.size()) {
    throw IoError("all " + std::to_string(failed) + " input files failed");
  }

  std::string index = "{\"clips\":[";
  bool first = true;
  for (std::size_t i = 0; i < wavs.size(); ++i) {
    if (!errors[i].empty()) continue;
    const std::string clip_id = wavs[i].stem().string();
    if (!first) index += ',';
    first = false;
    index += "{\"file\":\"" + json_escape(clip_id + ".amat") + "\",\"id\":\"" +
             json_escape(clip_id) + "\"}";
  }
  index += "],\"frame_rate\":" + std::to_string(mel.frame_rate) +
           ",\"n_mels\":" + std::to_string(mel.n_mels) + "}\n";
  write_text_file(out_dir / "index.json", index);

  Provenance prov;
  prov.command = "features";
  prov.seed = o.seed;
  prov.options = {
      {"augment", bool_name(o.augment)},
      {"fmax", canonical_double(o.fmax)},
      {"fmin", canonical_double(o.fmin)},
      {"frame_rate", std::to_string(o.frame_rate)},
      {"in", o.input_dir},
      {"jobs", std::to_string(o.jobs)},
      {"mask_fill", o.mask_fill},
      {"mask_freq_bins", std::to_string(o.mask_freq_bins)},
      {"mask_time_seconds", canonical_double(o.mask_time_seconds)},
      {"mels", std::to_string(o.n_mels)},
      {"n_freq_masks", std::to_string(o.n_freq_masks)},
      {"n_time_masks", std::to_string(o.n_time_masks)},
      {"out", o.out_dir},
      {"window", canonical_double(o.window_length)},
  };
  write_provenance(out_dir, prov);

  if (failed > 0) {
    std::fprintf(stderr, "note: %zu of %zu clips failed\n", failed, wavs.size());
  }
}

}  // namespace probekit::cli
