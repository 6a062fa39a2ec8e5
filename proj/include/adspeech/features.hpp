#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adspeech/chat.hpp"
#include "adspeech/dsp.hpp"

namespace adspeech {

/// The 14 prosodic features. F0 statistics are over log10 Hz of voiced
/// frames; slopes are mean |d log10 f0 / dt| between adjacent voiced frames,
/// the no-jump variant after removing pairs whose f0 ratio exceeds 1.5.
struct ProsodyFeatures {
  double mean_f0 = 0, std_f0 = 0, max_f0 = 0, min_f0 = 0, range_f0 = 0;
  double slope_f0 = 0, slope_f0_no_jump = 0;
  double mean_intensity = 0;
  double pause_ratio = 0, avg_pause_len = 0;
  double speech_rate = 0, articulation_rate = 0;
  double avg_syllable_dur = 0, effective_dur = 0;
  bool slope_no_jump_valid = true;  // false when every pair was a jump
  bool syllable_valid = true;       // false when no nuclei were found
};

struct VoiceQualityFeatures {
  double jitter_loc = 0, jitter_abs = 0, jitter_rap = 0, jitter_ppq5 = 0,
         jitter_ddp = 0;
  double shimmer_loc = 0, shimmer_db = 0, shimmer_apq3 = 0, shimmer_apq5 = 0,
         shimmer_apq11 = 0, shimmer_dda = 0;
  double autocorr_mean = 0, nhr = 0, hnr_db = 0;
};

struct VocabEntry {
  std::string lemma;
  std::string pos;
  long count = 0;
};

/// The 50 most frequent content lemmas of a training set plus the turn
/// ceiling used by the first-occurrence score.
struct Vocabulary {
  std::vector<VocabEntry> words;  // descending count, lexicographic ties
  int max_turns = 1;
};

struct LexicalFeatures {
  std::vector<double> word_scores;  // aligned with Vocabulary.words
  double inv_turns_norm = 0;
};

enum class FeatureSet { pros, vq, pros_vq, lex, lex_pros, sel, all };

FeatureSet feature_set_from_string(const std::string& tag);
std::string feature_set_name(FeatureSet set);

struct FeatureVector {
  std::string session_id;
  FeatureSet set;
  std::vector<std::string> names;
  std::vector<double> values;
};

// --- acoustic features ----------------------------------------------------

/// The seven F0 fields; requires at least two voiced frames.
ProsodyFeatures f0_features(const PitchContour& pc);

/// The six rhythm fields from a nucleus track and the clip duration.
void rhythm_features(const NucleusTrack& nt, double clip_dur, ProsodyFeatures& out);

/// Five jitter measures from a period track; requires >= 6 periods.
void jitter_features(const PeriodTrack& pt, VoiceQualityFeatures& out);

/// Six shimmer measures; requires >= 12 periods (the APQ11 window).
void shimmer_features(const PeriodTrack& pt, VoiceQualityFeatures& out);

// --- transcript features ---------------------------------------------------

/// Counts content lemmas in PAR utterances across the training transcripts
/// and keeps the top 50 (count descending, lemma ascending on ties).
Vocabulary build_vocabulary(std::span<const Transcript> training);

/// First-occurrence scores S = 1 - min(turn, maxTurns)/maxTurns, matching
/// lemmas inside PAR utterances against the global 1-based turn index;
/// absent words score 0.
std::vector<double> lexical_scores(const Transcript& t, const Vocabulary& v);

/// Min-max normalization of interviewer turn counts with constants fit on
/// training data; out-of-range test values clamp to [0, 1]. A degenerate
/// training range maps everything to 0 (the caller sees `degenerate`).
double normalize_inv_turns(int count, int train_min, int train_max);

// --- assembly ---------------------------------------------------------------

struct SessionFeatures {
  ProsodyFeatures pros;
  VoiceQualityFeatures vq;
  LexicalFeatures lex;
  double age = 0;
  double gender = 0;  // female = 0, male = 1
  bool audio_valid = true;
};

/// Canonical ordered names of a feature set (demographics appended).
std::vector<std::string> feature_names(FeatureSet set);

/// Expected dimension of a set, demographics included.
std::size_t feature_dim(FeatureSet set);

/// Ordered values for a set; raises DataError naming a missing constituent
/// (e.g. lexical features requested but absent).
FeatureVector assemble(const std::string& session_id, const SessionFeatures& f,
                       FeatureSet set, bool demographics = true);

}  // namespace adspeech
