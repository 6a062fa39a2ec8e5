#pragma once

#include <optional>
#include <string>
#include <vector>

namespace adspeech {

enum class Speaker { par, inv, other };

struct MorTag {
  std::string pos;    // %mor part-of-speech code, e.g. "n", "n:prop", "part"
  std::string lemma;  // lemma with fusional/suffix material stripped
  bool operator==(const MorTag&) const = default;
};

struct Utterance {
  int turn_index = 0;  // 1-based, increasing over the whole transcript
  Speaker speaker = Speaker::other;
  std::string speaker_code;           // the 3-letter tier code as written
  std::vector<std::string> tokens;    // normalized word forms, markup-free
  // Present only when the %mor tier aligned one tag per token; never
  // guessed on length mismatch.
  std::optional<std::vector<MorTag>> mor;
  bool operator==(const Utterance&) const = default;
};

struct Transcript {
  std::string session_id;
  std::vector<Utterance> utterances;
  int n_turns() const { return static_cast<int>(utterances.size()); }
  bool operator==(const Transcript&) const = default;
};

/// Parses a CHAT document. Main tiers (with tab continuations) become
/// utterances; %mor tiers attach to the preceding utterance; other headers
/// and dependent tiers are consumed. Structural problems raise DataError
/// with the offending line number.
Transcript parse_chat(const std::string& text, const std::string& session_id);

Transcript parse_chat_file(const std::string& path, const std::string& session_id);

/// Applies the token normalization rules to one main-tier text: lowercase,
/// retracing scopes keep the final form, events/fillers/pauses/comments
/// dropped, parenthesized completions expanded, terminal punctuation
/// removed. Unbalanced [ or < markup raises DataError with the offset.
std::vector<std::string> normalize_tokens(const std::string& raw);

int interviewer_turn_count(const Transcript& t);

/// Regenerates a CHAT document from a parsed transcript. Reparsing the
/// result yields an equal Transcript (round-trip property).
std::string to_chat(const Transcript& t);

/// Stable one-line-per-utterance debug form used by the golden-corpus
/// fixture comparisons.
std::string canonical_dump(const Transcript& t);

/// Content-word classification used for vocabulary building: nouns
/// (excluding proper nouns), adjectives, and verbs (including participles,
/// excluding auxiliaries and copulas).
bool is_content_pos(const std::string& pos);

}  // namespace adspeech
