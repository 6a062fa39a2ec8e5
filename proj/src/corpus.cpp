#include "adspeech/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "adspeech/audio.hpp"
#include "adspeech/csv.hpp"
#include "adspeech/error.hpp"
#include "adspeech/parallel.hpp"
#include "adspeech/rng.hpp"

namespace fs = std::filesystem;

namespace adspeech {

std::string label_name(Label l) { return l == Label::ad ? "AD" : "nonAD"; }

std::vector<SessionMeta> load_metadata(const std::string& path) {
  CsvDoc doc = read_csv(path);
  const std::vector<std::string> expected = {"id", "age", "gender", "label", "mmse"};
  if (doc.header != expected) {
    throw DataError("metadata: header must be id,age,gender,label,mmse");
  }
  std::vector<SessionMeta> out;
  std::vector<std::string> seen;
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    const std::string where = "metadata row " + std::to_string(r + 1);
    if (row.size() != 5) throw DataError(where + ": expected 5 fields");
    SessionMeta meta;
    meta.session_id = row[0];
    if (std::find(seen.begin(), seen.end(), meta.session_id) != seen.end()) {
      throw DataError(where + ": duplicate id " + meta.session_id);
    }
    seen.push_back(meta.session_id);
    try {
      std::size_t pos = 0;
      meta.age = std::stoi(row[1], &pos);
      if (pos != row[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError(where + " (" + meta.session_id + "): age is not an integer: " + row[1]);
    }
    if (row[2] == "male") {
      meta.gender = Gender::male;
    } else if (row[2] == "female") {
      meta.gender = Gender::female;
    } else {
      throw DataError(where + " (" + meta.session_id + "): unknown gender token: " + row[2]);
    }
    if (row[3] == "AD") {
      meta.label = Label::ad;
    } else if (row[3] == "nonAD") {
      meta.label = Label::non_ad;
    } else {
      throw DataError(where + " (" + meta.session_id + "): unknown label token: " + row[3]);
    }
    if (!row[4].empty()) {
      int mmse;
      try {
        std::size_t pos = 0;
        mmse = std::stoi(row[4], &pos);
        if (pos != row[4].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw DataError(where + " (" + meta.session_id + "): mmse is not an integer: " + row[4]);
      }
      if (mmse < 0 || mmse > 30) {
        throw DataError(where + " (" + meta.session_id + "): mmse out of [0, 30]");
      }
      meta.mmse = mmse;
    }
    out.push_back(std::move(meta));
  }
  return out;
}

void write_metadata(const std::string& path, const std::vector<SessionMeta>& metas,
                    const std::string& header_comment) {
  CsvDoc doc;
  if (!header_comment.empty()) doc.comments.push_back("# " + header_comment);
  doc.header = {"id", "age", "gender", "label", "mmse"};
  for (const SessionMeta& m : metas) {
    doc.rows.push_back({m.session_id, std::to_string(m.age),
                        m.gender == Gender::male ? "male" : "female",
                        label_name(m.label),
                        m.mmse ? std::to_string(*m.mmse) : ""});
  }
  write_csv(path, doc);
}

std::vector<SessionRecord> load_corpus(const std::string& corpus_dir) {
  const std::vector<SessionMeta> metas = load_metadata(corpus_dir + "/metadata.csv");
  std::vector<SessionRecord> out;
  for (const SessionMeta& m : metas) {
    SessionRecord rec;
    rec.meta = m;
    rec.audio_path = corpus_dir + "/audio/" + m.session_id + ".wav";
    rec.transcript_path = corpus_dir + "/transcripts/" + m.session_id + ".cha";
    out.push_back(std::move(rec));
  }
  return out;
}

EffectPlan EffectPlan::parse(const std::vector<std::string>& specs) {
  EffectPlan plan;
  for (const std::string& spec : specs) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string::npos) {
      throw UsageError("effect must be key:value, got '" + spec + "'");
    }
    const std::string key = spec.substr(0, colon);
    double value;
    try {
      value = std::stod(spec.substr(colon + 1));
    } catch (const std::exception&) {
      throw UsageError("effect value is not numeric: '" + spec + "'");
    }
    if (key == "ad30") {
      plan.ad_mmse_ceiling = static_cast<int>(value);
    } else if (key == "pause" || key == "rate" || key == "lex" || key == "f0" ||
               key == "inv" || key == "artic") {
      plan.shifts[key] = value;
    } else {
      throw UsageError("unknown effect key: '" + key + "'");
    }
  }
  return plan;
}

const std::vector<std::pair<std::string, std::string>>& keyword_pool() {
  static const std::vector<std::pair<std::string, std::string>> pool = {
      {"cookie", "n"},   {"jar", "n"},      {"boy", "n"},      {"girl", "n"},
      {"mother", "n"},   {"woman", "n"},    {"child", "n"},    {"sister", "n"},
      {"brother", "n"},  {"stool", "n"},    {"sink", "n"},     {"water", "n"},
      {"plate", "n"},    {"dish", "n"},     {"cup", "n"},      {"window", "n"},
      {"curtain", "n"},  {"kitchen", "n"},  {"floor", "n"},    {"counter", "n"},
      {"cabinet", "n"},  {"garden", "n"},   {"apron", "n"},    {"lid", "n"},
      {"shelf", "n"},    {"take", "v"},     {"fall", "v"},     {"wash", "v"},
      {"dry", "v"},      {"reach", "v"},    {"stand", "v"},    {"climb", "v"},
      {"tip", "v"},      {"overflow", "v"}, {"run", "v"},      {"spill", "v"},
      {"laugh", "v"},    {"ask", "v"},      {"grab", "v"},     {"slip", "v"},
      {"little", "adj"}, {"big", "adj"},    {"wet", "adj"},    {"full", "adj"},
      {"empty", "adj"},  {"high", "adj"},   {"open", "adj"},   {"busy", "adj"},
      {"careless", "adj"}, {"dirty", "adj"}};
  return pool;
}

namespace {

constexpr double kSyllableVoicedShare = 0.78;  // rest is the intra-word gap

struct SessionDraw {
  double q = 0;           // lexical quality
  double rate = 0;        // target speech rate, syll/s
  double artic = 0;       // target articulation rate, syll/s of phonation
  double pause_mean = 0;  // target mean pause
  double inv_real = 0;    // interviewer turns before rounding
  double f0 = 0;
  int n_turns = 0;
  int n_pauses = 0;
  int age = 0;
};

// Mean-matches the AD group to the non-AD group and applies the planted
// shift, so manifest group means differ by exactly the shift.
void apply_shift(std::vector<SessionDraw>& draws, const std::vector<Label>& labels,
                 double SessionDraw::* field, double shift) {
  double mean_ad = 0, mean_non = 0;
  int n_ad = 0, n_non = 0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    if (labels[i] == Label::ad) {
      mean_ad += draws[i].*field;
      ++n_ad;
    } else {
      mean_non += draws[i].*field;
      ++n_non;
    }
  }
  mean_ad /= n_ad;
  mean_non /= n_non;
  const double adjust = (mean_non - mean_ad) + shift;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    if (labels[i] == Label::ad) draws[i].*field += adjust;
  }
}

struct TurnPlan {
  std::vector<bool> is_inv;                      // per 1-based turn - 1
  std::vector<std::vector<std::size_t>> intro;   // keyword ranks per turn
  std::vector<int> first_turn;                   // per keyword rank, 0 = absent
  int keywords_used = 0;
};

TurnPlan plan_turns(const SessionDraw& d, Rng& rng) {
  TurnPlan plan;
  const int n = d.n_turns;
  plan.is_inv.assign(static_cast<std::size_t>(n), false);
  plan.is_inv[0] = true;  // the interviewer opens
  int inv_count = std::clamp(static_cast<int>(std::lround(d.inv_real)), 1, n / 2);
  std::vector<std::size_t> others;
  for (std::size_t t = 1; t < static_cast<std::size_t>(n); ++t) others.push_back(t);
  rng.shuffle(others);
  for (int i = 0; i + 1 < inv_count && static_cast<std::size_t>(i) < others.size(); ++i) {
    plan.is_inv[others[static_cast<std::size_t>(i)]] = true;
  }

  plan.intro.assign(static_cast<std::size_t>(n), {});
  plan.first_turn.assign(keyword_pool().size(), 0);
  const int m = std::clamp(static_cast<int>(std::lround(d.q * 50.0)), 2, 50);
  plan.keywords_used = m;
  // higher quality introduces the key words inside an earlier slice
  const double front = std::max(3.0, (1.0 - 0.45 * d.q) * n);
  for (int k = 0; k < m; ++k) {
    int target = 1 + static_cast<int>(std::floor((k + 0.5) * (front - 1.0) / m));
    target = std::min(target, n);
    // first PAR turn at or after the target (wrapping back if needed)
    int realized = 0;
    for (int t = target; t <= n; ++t) {
      if (!plan.is_inv[static_cast<std::size_t>(t - 1)]) {
        realized = t;
        break;
      }
    }
    if (realized == 0) {
      for (int t = target; t >= 1; --t) {
        if (!plan.is_inv[static_cast<std::size_t>(t - 1)]) {
          realized = t;
          break;
        }
      }
    }
    if (realized == 0) continue;
    plan.intro[static_cast<std::size_t>(realized - 1)].push_back(static_cast<std::size_t>(k));
    plan.first_turn[static_cast<std::size_t>(k)] = realized;
  }
  return plan;
}

double planted_score(const TurnPlan& plan, int max_turns) {
  double acc = 0;
  for (int t : plan.first_turn) {
    if (t > 0) {
      acc += 1.0 - std::min(static_cast<double>(t), static_cast<double>(max_turns)) /
                       static_cast<double>(max_turns);
    }
  }
  return acc / static_cast<double>(plan.first_turn.size());
}

// Filler vocabulary: tokens that never count as content words.
struct Filler {
  const char* word;
  const char* mor;
};
constexpr Filler kFillers[] = {
    {"the", "det|the"},   {"a", "det|a"},       {"and", "conj|and"},
    {"it", "pro|it"},     {"she", "pro|she"},   {"he", "pro|he"},
    {"there", "adv|there"}, {"very", "adv|very"}, {"in", "prep|in"},
    {"on", "prep|on"},    {"that", "pro:dem|that"}, {"is", "cop|be&3S"},
    {"yes", "co|yes"},    {"oh", "co|oh"},      {"well", "co|well"}};

void build_utterance(const TurnPlan& plan, std::size_t turn, Rng& rng,
                     std::vector<std::string>& tokens, std::vector<std::string>& mor) {
  tokens.clear();
  mor.clear();
  const auto& pool = keyword_pool();
  auto push_filler = [&](std::size_t idx) {
    tokens.push_back(kFillers[idx].word);
    mor.push_back(kFillers[idx].mor);
  };
  auto push_keyword = [&](std::size_t rank) {
    const auto& [lemma, pos] = pool[rank];
    if (pos == "n") {
      push_filler(rng.below(2));  // the / a
      if (rng.below(4) == 0) {
        // only an already-introduced adjective may be repeated here
        const std::size_t ai = 40 + rng.below(10);
        if (plan.first_turn[ai] != 0 &&
            static_cast<std::size_t>(plan.first_turn[ai]) <= turn + 1) {
          tokens.push_back(pool[ai].first);
          mor.push_back(pool[ai].second + std::string("|") + pool[ai].first);
        }
      }
    }
    tokens.push_back(lemma);
    mor.push_back(pos + std::string("|") + lemma);
  };

  if (rng.below(3) == 0) push_filler(13 + rng.below(2));  // oh / well
  bool any = false;
  for (std::size_t rank : plan.intro[turn]) {
    if (any) push_filler(2);  // and
    push_keyword(rank);
    any = true;
  }
  if (!any) {
    // repeat an earlier keyword or fall back to pure filler
    std::vector<std::size_t> seen;
    for (std::size_t k = 0; k < plan.first_turn.size(); ++k) {
      if (plan.first_turn[k] != 0 &&
          static_cast<std::size_t>(plan.first_turn[k]) <= turn + 1) {
        seen.push_back(k);
      }
    }
    if (!seen.empty() && rng.below(3) != 0) {
      push_filler(4 + rng.below(2));  // she / he
      push_filler(11);                // is
      push_keyword(seen[rng.below(seen.size())]);
    } else {
      push_filler(12);  // yes
      push_filler(3);   // it
      push_filler(11);  // is
      push_filler(6);   // there
    }
  }
  tokens.push_back(".");
  mor.push_back(".");
}

std::string render_transcript(const SessionMeta& meta, const TurnPlan& plan, Rng& rng) {
  std::ostringstream out;
  out << "@UTF8\n@Begin\n@Languages:\teng\n";
  out << "@Participants:\tPAR Participant, INV Investigator\n";
  out << "@ID:\teng|synth|PAR|" << meta.age << ";|"
      << (meta.gender == Gender::male ? "male" : "female") << "|" << label_name(meta.label)
      << "||Participant||\n";
  out << "@ID:\teng|synth|INV|||||Investigator||\n";

  static const char* inv_lines[] = {
      "*INV:\tmhm .\n%mor:\tco|mhm .\n",
      "*INV:\tgo on .\n%mor:\tv|go adv|on .\n",
      "*INV:\tanything else ?\n%mor:\tpro:indef|anything post|else ?\n"};

  std::vector<std::string> tokens, mor;
  for (std::size_t t = 0; t < plan.is_inv.size(); ++t) {
    if (plan.is_inv[t]) {
      if (t == 0) {
        out << "*INV:\twhat do you see in this picture ?\n"
            << "%mor:\tpro:int|what aux|do pro|you v|see prep|in det:dem|this n|picture ?\n";
      } else {
        out << inv_lines[rng.below(3)];
      }
      continue;
    }
    build_utterance(plan, t, rng, tokens, mor);
    out << "*PAR:\t";
    for (std::size_t i = 0; i < tokens.size(); ++i) out << (i ? " " : "") << tokens[i];
    out << "\n%mor:\t";
    for (std::size_t i = 0; i < mor.size(); ++i) out << (i ? " " : "") << mor[i];
    out << "\n";
  }
  out << "@End\n";
  return out.str();
}

}  // namespace

std::vector<PlantedSession> plan_corpus(const SynthCorpusOptions& opts) {
  if (opts.n_per_group < 2) throw DataError("synth_corpus: n_per_group must be >= 2");
  const int total = 2 * opts.n_per_group;

  std::vector<Label> labels;
  for (int i = 0; i < total; ++i) {
    labels.push_back(i % 2 == 0 ? Label::non_ad : Label::ad);
  }

  // base draws, one derived stream per session
  std::vector<SessionDraw> draws(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    Rng rng = Rng::derive(opts.seed, static_cast<std::uint64_t>(i));
    SessionDraw& d = draws[static_cast<std::size_t>(i)];
    d.q = std::clamp(0.62 + 0.12 * rng.normal(), 0.05, 0.98);
    d.rate = std::clamp(2.25 + 0.18 * rng.normal(), 1.3, 2.75);
    d.artic = std::clamp(3.9 + 0.3 * rng.normal(), 3.4, 4.6);
    d.pause_mean = std::max(0.2, 0.62 + 0.07 * rng.normal());
    d.inv_real = std::max(1.0, 2.2 + 0.8 * rng.normal());
    d.f0 = std::clamp(170.0 + 22.0 * rng.normal(), 95.0, 330.0);
    d.n_turns = 16 + static_cast<int>(rng.below(10));
    d.n_pauses = 5 + static_cast<int>(rng.below(4));
    d.age = 50 + static_cast<int>(rng.below(31));
  }

  for (const auto& [key, shift] : opts.effects.shifts) {
    if (key == "pause") apply_shift(draws, labels, &SessionDraw::pause_mean, shift);
    if (key == "rate") apply_shift(draws, labels, &SessionDraw::rate, shift);
    if (key == "lex") apply_shift(draws, labels, &SessionDraw::q, shift);
    if (key == "f0") apply_shift(draws, labels, &SessionDraw::f0, shift);
    if (key == "inv") apply_shift(draws, labels, &SessionDraw::inv_real, shift);
    if (key == "artic") apply_shift(draws, labels, &SessionDraw::artic, shift);
  }
  // shifted draws stay inside feasible territory; the planner and renderer
  // must see bit-identical values, so clamp once here
  for (SessionDraw& d : draws) {
    d.q = std::clamp(d.q, 0.02, 1.0);
    d.rate = std::clamp(d.rate, 0.8, 2.9);
    d.artic = std::clamp(d.artic, 3.2, 4.8);
    d.pause_mean = std::max(0.2, d.pause_mean);
    d.inv_real = std::max(1.0, d.inv_real);
    d.f0 = std::clamp(d.f0, 90.0, 340.0);
  }

  int max_turns = 1;
  for (const SessionDraw& d : draws) max_turns = std::max(max_turns, d.n_turns);

  std::vector<PlantedSession> plan(static_cast<std::size_t>(total));
  int ceilings_left = opts.effects.ad_mmse_ceiling;
  for (int i = 0; i < total; ++i) {
    Rng rng = Rng::derive(opts.seed, 10000 + static_cast<std::uint64_t>(i));
    const SessionDraw& d = draws[static_cast<std::size_t>(i)];
    PlantedSession& s = plan[static_cast<std::size_t>(i)];

    char id[16];
    std::snprintf(id, sizeof(id), "S%03d", i + 1);
    s.meta.session_id = id;
    s.meta.label = labels[static_cast<std::size_t>(i)];
    s.meta.gender = (i / 2) % 2 == 0 ? Gender::female : Gender::male;
    s.meta.age = d.age;

    const TurnPlan turns = plan_turns(d, rng);
    s.n_turns = d.n_turns;
    s.inv_turns = static_cast<int>(
        std::count(turns.is_inv.begin(), turns.is_inv.end(), true));
    s.keywords_used = turns.keywords_used;
    s.lex_quality = d.q;
    s.lex_score = planted_score(turns, max_turns);

    s.f0_hz = d.f0;
    s.mean_pause_s = d.pause_mean;
    s.pause_count = d.n_pauses;
    s.pause_total_s = d.pause_mean * d.n_pauses;
    s.speech_rate = d.rate;

    const int groups = d.n_pauses - 1;
    const double d_syl = 1.0 / d.artic;
    const double speech_share = std::min(d.rate * d_syl, 0.8);
    const double clip_est = s.pause_total_s / (1.0 - speech_share);
    s.n_syllables = std::max(groups, static_cast<int>(std::lround(d.rate * clip_est)));
    s.phonation_s = d_syl * (s.n_syllables - groups * (1.0 - kSyllableVoicedShare));
    s.articulation_rate = s.n_syllables / s.phonation_s;
    s.clip_dur_s = s.phonation_s + s.pause_total_s;

    double mmse = 4.0 + 44.0 * s.lex_score + 1.5 * rng.normal();
    int mmse_int = std::clamp(static_cast<int>(std::lround(mmse)), 0, 30);
    if (s.meta.label == Label::ad && ceilings_left > 0) {
      mmse_int = 30;
      s.mmse_ceiling_outlier = true;
      --ceilings_left;
    }
    s.meta.mmse = mmse_int;
  }
  return plan;
}

std::vector<PlantedSession> synth_corpus(const std::string& out_dir,
                                         const SynthCorpusOptions& opts) {
  std::vector<PlantedSession> plan = plan_corpus(opts);

  fs::create_directories(out_dir);
  fs::create_directories(out_dir + "/audio");
  fs::create_directories(out_dir + "/transcripts");

  int max_turns = 1;
  for (const PlantedSession& s : plan) max_turns = std::max(max_turns, s.n_turns);

  std::vector<std::string> errors(plan.size());
  for_index(plan.size(), true, [&](std::size_t i) {
    try {
      const PlantedSession& s = plan[i];
      // re-derive the same per-session streams the planner used
      Rng rng = Rng::derive(opts.seed, 10000 + static_cast<std::uint64_t>(i));
      SessionDraw d;
      d.q = s.lex_quality;
      d.inv_real = s.inv_turns;
      d.n_turns = s.n_turns;
      const TurnPlan turns = plan_turns(d, rng);
      {
        // burn the planner's mmse noise draw to stay aligned
        (void)rng.normal();
      }

      std::ofstream cha(out_dir + "/transcripts/" + s.meta.session_id + ".cha");
      if (!cha) throw DataError("cannot write transcript for " + s.meta.session_id);
      cha << render_transcript(s.meta, turns, rng);
      cha.close();

      // audio: pause-bounded syllable groups
      Rng arng = Rng::derive(opts.seed, 20000 + static_cast<std::uint64_t>(i));
      const int groups = s.pause_count - 1;
      std::vector<int> per_group(static_cast<std::size_t>(groups), s.n_syllables / groups);
      for (int rem = s.n_syllables % groups; rem > 0; --rem) {
        per_group[static_cast<std::size_t>(arng.below(static_cast<std::uint64_t>(groups)))] += 1;
      }
      std::vector<double> pauses(static_cast<std::size_t>(s.pause_count));
      double pause_sum = 0;
      for (double& p : pauses) {
        p = s.mean_pause_s * (0.7 + 0.6 * arng.uniform());
        pause_sum += p;
      }
      const double fix = s.pause_total_s / pause_sum;
      for (double& p : pauses) p *= fix;

      const double d_syl = s.phonation_s /
                           (s.n_syllables - groups * (1.0 - kSyllableVoicedShare));
      SynthSpec spec;
      spec.f0_hz = s.f0_hz;
      spec.jitter_target = 0.008;
      spec.shimmer_target = 0.015;
      spec.sample_rate = opts.sample_rate;
      spec.segments.clear();
      for (int g = 0; g < groups; ++g) {
        spec.segments.push_back({SegKind::pause, pauses[static_cast<std::size_t>(g)]});
        for (int y = 0; y < per_group[static_cast<std::size_t>(g)]; ++y) {
          if (y > 0) {
            spec.segments.push_back({SegKind::pause, (1.0 - kSyllableVoicedShare) * d_syl});
          }
          spec.segments.push_back({SegKind::speech, kSyllableVoicedShare * d_syl});
        }
      }
      spec.segments.push_back({SegKind::pause, pauses.back()});

      SynthVoice voice = synth_voice(spec, Rng::derive(opts.seed, 30000 + i).next_u64());
      write_wav(out_dir + "/audio/" + s.meta.session_id + ".wav", voice.clip);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const std::string& e : errors) {
    if (!e.empty()) throw DataError("synth_corpus: " + e);
  }

  std::vector<SessionMeta> metas;
  for (const PlantedSession& s : plan) metas.push_back(s.meta);
  write_metadata(out_dir + "/metadata.csv", metas, opts.header_comment);
  write_manifest(out_dir + "/manifest.csv", plan, opts.header_comment);
  return plan;
}

void write_manifest(const std::string& path, const std::vector<PlantedSession>& plan,
                    const std::string& header_comment) {
  CsvDoc doc;
  if (!header_comment.empty()) doc.comments.push_back("# " + header_comment);
  doc.header = {"session_id", "label", "age", "gender", "mmse", "f0_hz",
                "mean_pause_s", "pause_count", "pause_total_s", "speech_rate",
                "articulation_rate", "n_syllables", "clip_dur_s", "phonation_s",
                "lex_quality", "lex_score", "n_turns", "inv_turns",
                "keywords_used", "mmse_ceiling_outlier"};
  for (const PlantedSession& s : plan) {
    doc.rows.push_back(
        {s.meta.session_id, label_name(s.meta.label), std::to_string(s.meta.age),
         s.meta.gender == Gender::male ? "male" : "female",
         s.meta.mmse ? std::to_string(*s.meta.mmse) : "",
         format_double(s.f0_hz), format_double(s.mean_pause_s),
         std::to_string(s.pause_count), format_double(s.pause_total_s),
         format_double(s.speech_rate), format_double(s.articulation_rate),
         std::to_string(s.n_syllables), format_double(s.clip_dur_s),
         format_double(s.phonation_s), format_double(s.lex_quality),
         format_double(s.lex_score), std::to_string(s.n_turns),
         std::to_string(s.inv_turns), std::to_string(s.keywords_used),
         s.mmse_ceiling_outlier ? "1" : "0"});
  }
  write_csv(path, doc);
}

std::vector<PlantedSession> read_manifest(const std::string& path) {
  CsvDoc doc = read_csv(path);
  std::vector<PlantedSession> out;
  auto col = [&](const std::string& name) {
    for (std::size_t j = 0; j < doc.header.size(); ++j) {
      if (doc.header[j] == name) return j;
    }
    throw DataError("manifest: missing column " + name);
  };
  const std::size_t c_id = col("session_id"), c_label = col("label"),
                    c_age = col("age"), c_gender = col("gender"), c_mmse = col("mmse"),
                    c_f0 = col("f0_hz"), c_mp = col("mean_pause_s"),
                    c_pc = col("pause_count"), c_pt = col("pause_total_s"),
                    c_sr = col("speech_rate"), c_ar = col("articulation_rate"),
                    c_ns = col("n_syllables"), c_cd = col("clip_dur_s"),
                    c_ph = col("phonation_s"), c_lq = col("lex_quality"),
                    c_ls = col("lex_score"), c_nt = col("n_turns"),
                    c_it = col("inv_turns"), c_kw = col("keywords_used"),
                    c_out = col("mmse_ceiling_outlier");
  for (const auto& row : doc.rows) {
    PlantedSession s;
    s.meta.session_id = row[c_id];
    s.meta.label = row[c_label] == "AD" ? Label::ad : Label::non_ad;
    s.meta.age = std::stoi(row[c_age]);
    s.meta.gender = row[c_gender] == "male" ? Gender::male : Gender::female;
    if (!row[c_mmse].empty()) s.meta.mmse = std::stoi(row[c_mmse]);
    s.f0_hz = std::stod(row[c_f0]);
    s.mean_pause_s = std::stod(row[c_mp]);
    s.pause_count = std::stoi(row[c_pc]);
    s.pause_total_s = std::stod(row[c_pt]);
    s.speech_rate = std::stod(row[c_sr]);
    s.articulation_rate = std::stod(row[c_ar]);
    s.n_syllables = std::stoi(row[c_ns]);
    s.clip_dur_s = std::stod(row[c_cd]);
    s.phonation_s = std::stod(row[c_ph]);
    s.lex_quality = std::stod(row[c_lq]);
    s.lex_score = std::stod(row[c_ls]);
    s.n_turns = std::stoi(row[c_nt]);
    s.inv_turns = std::stoi(row[c_it]);
    s.keywords_used = std::stoi(row[c_kw]);
    s.mmse_ceiling_outlier = row[c_out] == "1";
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace adspeech
