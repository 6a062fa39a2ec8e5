#include "adspeech/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "adspeech/error.hpp"

namespace adspeech {

ProsodyFeatures f0_features(const PitchContour& pc) {
  std::vector<double> logs;
  for (std::size_t k = 0; k < pc.voiced.size(); ++k) {
    if (pc.voiced[k]) logs.push_back(std::log10(pc.f0[k]));
  }
  if (logs.size() < 2) throw DataError("f0_features: insufficient voicing");

  ProsodyFeatures out;
  const double n = static_cast<double>(logs.size());
  const double mean = std::accumulate(logs.begin(), logs.end(), 0.0) / n;
  double ss = 0;
  for (double v : logs) ss += (v - mean) * (v - mean);
  out.mean_f0 = mean;
  out.std_f0 = std::sqrt(ss / (n - 1));
  out.max_f0 = *std::max_element(logs.begin(), logs.end());
  out.min_f0 = *std::min_element(logs.begin(), logs.end());
  out.range_f0 = out.max_f0 - out.min_f0;

  // slopes over pairs of adjacent frames that are both voiced
  double slope_sum = 0, nj_sum = 0;
  std::size_t slope_n = 0, nj_n = 0;
  for (std::size_t k = 0; k + 1 < pc.voiced.size(); ++k) {
    if (!pc.voiced[k] || !pc.voiced[k + 1]) continue;
    const double d = std::fabs(std::log10(pc.f0[k + 1]) - std::log10(pc.f0[k])) / pc.step_s;
    slope_sum += d;
    ++slope_n;
    const double ratio = pc.f0[k + 1] > pc.f0[k] ? pc.f0[k + 1] / pc.f0[k]
                                                 : pc.f0[k] / pc.f0[k + 1];
    if (ratio <= 1.5) {  // octave-jump removal
      nj_sum += d;
      ++nj_n;
    }
  }
  out.slope_f0 = slope_n ? slope_sum / static_cast<double>(slope_n) : 0.0;
  if (nj_n) {
    out.slope_f0_no_jump = nj_sum / static_cast<double>(nj_n);
  } else {
    out.slope_f0_no_jump = 0.0;
    out.slope_no_jump_valid = false;
  }
  return out;
}

void rhythm_features(const NucleusTrack& nt, double clip_dur, ProsodyFeatures& out) {
  if (clip_dur <= 0) throw DataError("rhythm_features: clip duration must be positive");
  double pause_total = 0;
  for (const TimeSpan& p : nt.pause_spans) pause_total += p.length();
  const double nuclei = static_cast<double>(nt.nucleus_times.size());

  out.pause_ratio = pause_total / clip_dur;
  out.avg_pause_len = nt.pause_spans.empty() ? 0.0 : pause_total / static_cast<double>(nt.pause_spans.size());
  out.speech_rate = nuclei / clip_dur;
  out.effective_dur = nt.phonation_time;
  if (nuclei > 0 && nt.phonation_time > 0) {
    out.articulation_rate = nuclei / nt.phonation_time;
    out.avg_syllable_dur = nt.phonation_time / nuclei;
  } else {
    out.articulation_rate = 0;
    out.avg_syllable_dur = 0;
    out.syllable_valid = false;
  }
}

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// mean |x_i - mean(window of N centered at i)| over the valid index range
double apq(const std::vector<double>& x, std::size_t window) {
  const std::size_t half = window / 2;
  double acc = 0;
  std::size_t n = 0;
  for (std::size_t i = half; i + half < x.size(); ++i) {
    double m = 0;
    for (std::size_t j = i - half; j <= i + half; ++j) m += x[j];
    m /= static_cast<double>(window);
    acc += std::fabs(x[i] - m);
    ++n;
  }
  return n ? acc / static_cast<double>(n) : 0.0;
}

}  // namespace

void jitter_features(const PeriodTrack& pt, VoiceQualityFeatures& out) {
  const std::vector<double>& t = pt.periods;
  if (t.size() < 6) throw DataError("jitter_features: too few periods");
  const double mean_t = mean_of(t);

  double abs_acc = 0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) abs_acc += std::fabs(t[i + 1] - t[i]);
  out.jitter_abs = abs_acc / static_cast<double>(t.size() - 1);
  out.jitter_loc = out.jitter_abs / mean_t;

  out.jitter_rap = apq(t, 3) / mean_t;
  out.jitter_ppq5 = apq(t, 5) / mean_t;
  // |T[i] - mean(T[i-1..i+1])| is |second difference| / 3 over the same
  // index range, so ddp = 3 * rap identically.
  out.jitter_ddp = 3.0 * out.jitter_rap;
}

void shimmer_features(const PeriodTrack& pt, VoiceQualityFeatures& out) {
  const std::vector<double>& a = pt.amplitudes;
  if (a.size() < 12) throw DataError("shimmer_features: too few periods");
  const double mean_a = mean_of(a);

  double loc_acc = 0, db_acc = 0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    loc_acc += std::fabs(a[i + 1] - a[i]);
    db_acc += std::fabs(20.0 * std::log10(a[i + 1] / a[i]));
  }
  const double pairs = static_cast<double>(a.size() - 1);
  out.shimmer_loc = loc_acc / pairs / mean_a;
  out.shimmer_db = db_acc / pairs;
  out.shimmer_apq3 = apq(a, 3) / mean_a;
  out.shimmer_apq5 = apq(a, 5) / mean_a;
  out.shimmer_apq11 = apq(a, 11) / mean_a;
  out.shimmer_dda = 3.0 * out.shimmer_apq3;
}

Vocabulary build_vocabulary(std::span<const Transcript> training) {
  std::map<std::string, std::pair<long, std::string>> counts;  // lemma -> (count, pos)
  int max_turns = 1;
  for (const Transcript& t : training) {
    max_turns = std::max(max_turns, t.n_turns());
    for (const Utterance& u : t.utterances) {
      if (u.speaker != Speaker::par || !u.mor) continue;
      for (const MorTag& tag : *u.mor) {
        if (!is_content_pos(tag.pos)) continue;
        auto& slot = counts[tag.lemma];
        slot.first += 1;
        if (slot.second.empty()) slot.second = tag.pos;
      }
    }
  }
  if (counts.size() < 50) {
    throw DataError("build_vocabulary: fewer than 50 distinct content lemmas (" +
                    std::to_string(counts.size()) + ")");
  }
  std::vector<VocabEntry> entries;
  entries.reserve(counts.size());
  for (const auto& [lemma, cp] : counts) {
    entries.push_back({lemma, cp.second, cp.first});
  }
  std::sort(entries.begin(), entries.end(), [](const VocabEntry& a, const VocabEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.lemma < b.lemma;
  });
  entries.resize(50);

  Vocabulary v;
  v.words = std::move(entries);
  v.max_turns = max_turns;
  return v;
}

std::vector<double> lexical_scores(const Transcript& t, const Vocabulary& v) {
  std::vector<double> scores(v.words.size(), 0.0);
  const double max_turns = static_cast<double>(v.max_turns);
  for (std::size_t w = 0; w < v.words.size(); ++w) {
    const std::string& lemma = v.words[w].lemma;
    int first = 0;
    for (const Utterance& u : t.utterances) {
      if (u.speaker != Speaker::par) continue;
      bool found = false;
      if (u.mor) {
        for (const MorTag& tag : *u.mor) {
          if (tag.lemma == lemma) found = true;
        }
      } else {
        for (const std::string& tok : u.tokens) {
          if (tok == lemma) found = true;
        }
      }
      if (found) {
        first = u.turn_index;
        break;
      }
    }
    if (first == 0) continue;  // absent: turn = infinity, score 0
    const double clamped = std::min(static_cast<double>(first), max_turns);
    scores[w] = 1.0 - clamped / max_turns;
  }
  return scores;
}

double normalize_inv_turns(int count, int train_min, int train_max) {
  if (train_max <= train_min) return 0.0;  // degenerate training range
  const double v = (static_cast<double>(count) - train_min) /
                   (static_cast<double>(train_max) - train_min);
  return std::clamp(v, 0.0, 1.0);
}

// --- assembly ---------------------------------------------------------------

namespace {

const std::vector<std::string>& pros_names() {
  static const std::vector<std::string> names = {
      "mean_f0",        "std_f0",       "max_f0",
      "min_f0",         "range_f0",     "slope_f0",
      "slope_f0_no_jump", "mean_intensity", "pause_ratio",
      "avg_pause_len",  "speech_rate",  "articulation_rate",
      "avg_syllable_dur", "effective_dur"};
  return names;
}

const std::vector<std::string>& vq_names() {
  static const std::vector<std::string> names = {
      "jitter_loc",   "jitter_abs",   "jitter_rap",  "jitter_ppq5",
      "jitter_ddp",   "shimmer_loc",  "shimmer_db",  "shimmer_apq3",
      "shimmer_apq5", "shimmer_apq11", "shimmer_dda", "autocorr_mean",
      "nhr",          "hnr_db"};
  return names;
}

std::vector<std::string> lex_names() {
  std::vector<std::string> names;
  for (int i = 1; i <= 50; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "lex%02d", i);
    names.push_back(buf);
  }
  names.push_back("inv_turns_norm");
  return names;
}

// Table-1 selection: the significant acoustic features plus the lexical
// mean and the normalized interviewer turn count.
const std::vector<std::string>& sel_names() {
  static const std::vector<std::string> names = {
      "mean_f0",       "std_f0",          "slope_f0",
      "slope_f0_no_jump", "jitter_abs",   "avg_pause_len",
      "speech_rate",   "articulation_rate", "avg_syllable_dur",
      "lexical_words", "inv_turns_norm"};
  return names;
}

void append_pros(const ProsodyFeatures& p, std::vector<double>& v) {
  v.insert(v.end(), {p.mean_f0, p.std_f0, p.max_f0, p.min_f0, p.range_f0,
                     p.slope_f0, p.slope_f0_no_jump, p.mean_intensity,
                     p.pause_ratio, p.avg_pause_len, p.speech_rate,
                     p.articulation_rate, p.avg_syllable_dur, p.effective_dur});
}

void append_vq(const VoiceQualityFeatures& q, std::vector<double>& v) {
  v.insert(v.end(), {q.jitter_loc, q.jitter_abs, q.jitter_rap, q.jitter_ppq5,
                     q.jitter_ddp, q.shimmer_loc, q.shimmer_db, q.shimmer_apq3,
                     q.shimmer_apq5, q.shimmer_apq11, q.shimmer_dda,
                     q.autocorr_mean, q.nhr, q.hnr_db});
}

}  // namespace

FeatureSet feature_set_from_string(const std::string& tag) {
  if (tag == "pros") return FeatureSet::pros;
  if (tag == "vq") return FeatureSet::vq;
  if (tag == "pros+vq") return FeatureSet::pros_vq;
  if (tag == "lex") return FeatureSet::lex;
  if (tag == "lex+pros") return FeatureSet::lex_pros;
  if (tag == "sel") return FeatureSet::sel;
  if (tag == "all") return FeatureSet::all;
  throw UsageError("unknown feature set: " + tag);
}

std::string feature_set_name(FeatureSet set) {
  switch (set) {
    case FeatureSet::pros: return "pros";
    case FeatureSet::vq: return "vq";
    case FeatureSet::pros_vq: return "pros+vq";
    case FeatureSet::lex: return "lex";
    case FeatureSet::lex_pros: return "lex+pros";
    case FeatureSet::sel: return "sel";
    case FeatureSet::all: return "all";
  }
  throw InternalError("unreachable feature set");
}

std::vector<std::string> feature_names(FeatureSet set) {
  std::vector<std::string> names;
  auto add = [&](const std::vector<std::string>& more) {
    names.insert(names.end(), more.begin(), more.end());
  };
  switch (set) {
    case FeatureSet::pros: add(pros_names()); break;
    case FeatureSet::vq: add(vq_names()); break;
    case FeatureSet::pros_vq: add(pros_names()); add(vq_names()); break;
    case FeatureSet::lex: add(lex_names()); break;
    case FeatureSet::lex_pros: add(lex_names()); add(pros_names()); break;
    case FeatureSet::sel: add(sel_names()); break;
    case FeatureSet::all: add(pros_names()); add(vq_names()); add(lex_names()); break;
  }
  names.push_back("age");
  names.push_back("gender");
  return names;
}

std::size_t feature_dim(FeatureSet set) { return feature_names(set).size(); }

FeatureVector assemble(const std::string& session_id, const SessionFeatures& f,
                       FeatureSet set, bool demographics) {
  const bool needs_lex = set == FeatureSet::lex || set == FeatureSet::lex_pros ||
                         set == FeatureSet::sel || set == FeatureSet::all;
  if (needs_lex && f.lex.word_scores.size() != 50) {
    throw DataError("assemble: missing constituent word_scores for session " + session_id);
  }

  FeatureVector out;
  out.session_id = session_id;
  out.set = set;
  out.names = feature_names(set);
  std::vector<double>& v = out.values;

  auto append_lex = [&] {
    v.insert(v.end(), f.lex.word_scores.begin(), f.lex.word_scores.end());
    v.push_back(f.lex.inv_turns_norm);
  };
  switch (set) {
    case FeatureSet::pros: append_pros(f.pros, v); break;
    case FeatureSet::vq: append_vq(f.vq, v); break;
    case FeatureSet::pros_vq: append_pros(f.pros, v); append_vq(f.vq, v); break;
    case FeatureSet::lex: append_lex(); break;
    case FeatureSet::lex_pros: append_lex(); append_pros(f.pros, v); break;
    case FeatureSet::sel: {
      const double lexical_words =
          std::accumulate(f.lex.word_scores.begin(), f.lex.word_scores.end(), 0.0) / 50.0;
      v.insert(v.end(), {f.pros.mean_f0, f.pros.std_f0, f.pros.slope_f0,
                         f.pros.slope_f0_no_jump, f.vq.jitter_abs,
                         f.pros.avg_pause_len, f.pros.speech_rate,
                         f.pros.articulation_rate, f.pros.avg_syllable_dur,
                         lexical_words, f.lex.inv_turns_norm});
      break;
    }
    case FeatureSet::all:
      append_pros(f.pros, v);
      append_vq(f.vq, v);
      append_lex();
      break;
  }
  if (demographics) {
    v.push_back(f.age);
    v.push_back(f.gender);
  } else {
    out.names.resize(out.names.size() - 2);
  }
  if (out.names.size() != v.size()) {
    throw InternalError("assemble: name/value length mismatch");
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw DataError("assemble: non-finite feature for session " + session_id);
    }
  }
  return out;
}

}  // namespace adspeech
