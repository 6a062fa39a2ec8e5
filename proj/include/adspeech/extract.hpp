#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adspeech/corpus.hpp"
#include "adspeech/features.hpp"

namespace adspeech {

struct FeatureRow {
  std::string session_id;
  std::string label;  // "AD" / "nonAD"
  std::optional<int> mmse;
  std::vector<double> values;
  bool audio_valid = true;
};

/// The extract -> train file contract: header session_id,label,mmse,
/// canonical feature names, audio_valid; one row per session.
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<FeatureRow> rows;
};

void write_feature_csv(const std::string& path, const FeatureTable& table,
                       const std::string& header_comment);
FeatureTable read_feature_csv(const std::string& path);

/// Training-set constants every later stage reuses: the vocabulary and the
/// interviewer-turn normalization range.
struct Sidecar {
  Vocabulary vocab;
  int inv_min = 0;
  int inv_max = 0;
};

void save_sidecar(const std::string& path, const Sidecar& sc,
                  const std::string& header_comment);
Sidecar load_sidecar(const std::string& path);

struct DspBundle {
  PitchConfig pitch;
  IntensityConfig intensity;
  NucleusConfig nucleus;
  bool parallel = true;
};

/// Acoustic half of a session's features. Sessions without usable voiced
/// speech come back zeroed with audio_valid = false instead of failing.
void compute_acoustics(const AudioClip& clip, const DspBundle& dsp,
                       SessionFeatures& out);

struct ExtractResult {
  FeatureTable table;
  Sidecar sidecar;
  std::vector<std::string> warnings;  // skipped sessions etc.
};

/// Runs the whole per-session feature extraction over a corpus directory.
/// With `fit` the sidecar constants are fit on this corpus; otherwise the
/// provided sidecar is applied unchanged (test-set extraction).
ExtractResult extract_corpus(const std::string& corpus_dir, FeatureSet set,
                             const DspBundle& dsp,
                             const std::optional<Sidecar>& sidecar, bool fit,
                             bool demographics = true);

}  // namespace adspeech
