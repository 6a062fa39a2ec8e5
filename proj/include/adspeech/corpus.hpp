#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adspeech/synth.hpp"

namespace adspeech {

enum class Gender { female, male };
enum class Label { ad, non_ad };

std::string label_name(Label l);

struct SessionMeta {
  std::string session_id;
  int age = 0;
  Gender gender = Gender::female;
  Label label = Label::non_ad;
  std::optional<int> mmse;
};

struct SessionRecord {
  SessionMeta meta;
  std::string audio_path;
  std::string transcript_path;
};

/// Reads a metadata CSV (`id,age,gender,label,mmse`, header mandatory,
/// leading '#' comment lines allowed). Errors name the offending row.
std::vector<SessionMeta> load_metadata(const std::string& path);

void write_metadata(const std::string& path, const std::vector<SessionMeta>& metas,
                    const std::string& header_comment);

/// Binds metadata to audio/ and transcripts/ files under a corpus directory;
/// both paths must resolve.
std::vector<SessionRecord> load_corpus(const std::string& corpus_dir);

/// Group-mean shifts applied to the AD group's planted quantities. Values
/// are deltas in the quantity's own units; `ad_mmse_ceiling` plants that
/// many AD sessions with an MMSE of 30 (the Fig-1-style outlier pattern).
struct EffectPlan {
  std::map<std::string, double> shifts;  // keys: pause, rate, lex, f0, inv
  int ad_mmse_ceiling = 0;

  static EffectPlan parse(const std::vector<std::string>& specs);
};

/// One session's planted ground truth as recorded in the manifest.
struct PlantedSession {
  SessionMeta meta;
  double f0_hz = 0;
  double mean_pause_s = 0;
  int pause_count = 0;
  double pause_total_s = 0;
  double speech_rate = 0;        // syllables / clip second
  double articulation_rate = 0;  // syllables / phonation second
  int n_syllables = 0;
  double clip_dur_s = 0;
  double phonation_s = 0;
  double lex_quality = 0;  // the latent q driving keyword placement
  double lex_score = 0;    // planted mean first-occurrence score
  int n_turns = 0;
  int inv_turns = 0;
  int keywords_used = 0;
  bool mmse_ceiling_outlier = false;
};

struct SynthCorpusOptions {
  int n_per_group = 10;
  EffectPlan effects;
  std::uint64_t seed = 1;
  int sample_rate = 16000;
  std::string header_comment;  // echoed into every emitted file
};

/// Plans the planted quantities for every session without rendering audio.
/// Quantities named in the effect plan are mean-matched between groups and
/// then shifted, so manifest group means differ by exactly the planted
/// amount; everything else is an independent draw.
std::vector<PlantedSession> plan_corpus(const SynthCorpusOptions& opts);

/// Renders a planned corpus to disk: WAVs, CHAT transcripts, metadata CSV
/// and the ground-truth manifest CSV. Returns the plan it rendered.
std::vector<PlantedSession> synth_corpus(const std::string& out_dir,
                                         const SynthCorpusOptions& opts);

void write_manifest(const std::string& path,
                    const std::vector<PlantedSession>& plan,
                    const std::string& header_comment);
std::vector<PlantedSession> read_manifest(const std::string& path);

/// The 50 content lemmas the generator plants (picture-description nouns,
/// verbs and adjectives), rank-ordered.
const std::vector<std::pair<std::string, std::string>>& keyword_pool();  // (lemma, pos)

}  // namespace adspeech
