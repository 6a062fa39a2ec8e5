#include "adspeech/extract.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "adspeech/audio.hpp"
#include "adspeech/csv.hpp"
#include "adspeech/error.hpp"
#include "adspeech/parallel.hpp"

namespace adspeech {

void write_feature_csv(const std::string& path, const FeatureTable& table,
                       const std::string& header_comment) {
  CsvDoc doc;
  if (!header_comment.empty()) doc.comments.push_back("# " + header_comment);
  doc.header = {"session_id", "label", "mmse"};
  doc.header.insert(doc.header.end(), table.names.begin(), table.names.end());
  doc.header.push_back("audio_valid");
  for (const FeatureRow& row : table.rows) {
    std::vector<std::string> fields = {row.session_id, row.label,
                                       row.mmse ? std::to_string(*row.mmse) : ""};
    if (row.values.size() != table.names.size()) {
      throw InternalError("feature table row width mismatch for " + row.session_id);
    }
    for (double v : row.values) fields.push_back(format_double(v));
    fields.push_back(row.audio_valid ? "1" : "0");
    doc.rows.push_back(std::move(fields));
  }
  write_csv(path, doc);
}

FeatureTable read_feature_csv(const std::string& path) {
  CsvDoc doc = read_csv(path);
  if (doc.header.size() < 4 || doc.header[0] != "session_id" ||
      doc.header[1] != "label" || doc.header[2] != "mmse") {
    throw DataError("feature CSV: header must start session_id,label,mmse: " + path);
  }
  const bool has_valid = doc.header.back() == "audio_valid";
  FeatureTable table;
  table.names.assign(doc.header.begin() + 3,
                     has_valid ? doc.header.end() - 1 : doc.header.end());
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    if (row.size() != doc.header.size()) {
      throw DataError("feature CSV row " + std::to_string(r + 1) + ": field count mismatch");
    }
    FeatureRow out;
    out.session_id = row[0];
    out.label = row[1];
    if (!row[2].empty()) out.mmse = std::stoi(row[2]);
    const std::size_t n_values = table.names.size();
    for (std::size_t j = 0; j < n_values; ++j) {
      try {
        out.values.push_back(std::stod(row[3 + j]));
      } catch (const std::exception&) {
        throw DataError("feature CSV row " + std::to_string(r + 1) +
                        ": non-numeric value in column " + table.names[j]);
      }
    }
    out.audio_valid = !has_valid || row.back() == "1";
    table.rows.push_back(std::move(out));
  }
  return table;
}

void save_sidecar(const std::string& path, const Sidecar& sc,
                  const std::string& header_comment) {
  nlohmann::json j;
  j["header"] = header_comment;
  j["max_turns"] = sc.vocab.max_turns;
  j["inv_min"] = sc.inv_min;
  j["inv_max"] = sc.inv_max;
  nlohmann::json words = nlohmann::json::array();
  for (const VocabEntry& w : sc.vocab.words) {
    words.push_back({{"lemma", w.lemma}, {"pos", w.pos}, {"count", w.count}});
  }
  j["vocabulary"] = words;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write sidecar: " + path);
  out << j.dump(1) << "\n";
}

Sidecar load_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("sidecar not found: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DataError("sidecar is not valid JSON: " + path + " (" + e.what() + ")");
  }
  Sidecar sc;
  sc.vocab.max_turns = j.at("max_turns");
  sc.inv_min = j.at("inv_min");
  sc.inv_max = j.at("inv_max");
  for (const auto& w : j.at("vocabulary")) {
    sc.vocab.words.push_back({w.at("lemma"), w.at("pos"), w.at("count")});
  }
  return sc;
}

void compute_acoustics(const AudioClip& clip, const DspBundle& dsp,
                       SessionFeatures& out) {
  PitchConfig pitch_cfg = dsp.pitch;
  pitch_cfg.parallel = dsp.parallel && pitch_cfg.parallel;
  IntensityConfig intensity_cfg = dsp.intensity;
  intensity_cfg.parallel = dsp.parallel && intensity_cfg.parallel;

  try {
    const PitchContour pc = pitch_track(clip, pitch_cfg);
    const IntensityContour ic = intensity_contour(clip, intensity_cfg);
    const NucleusTrack nt = detect_nuclei(clip, ic, pc, dsp.nucleus);
    const PeriodTrack pt = extract_periods(clip, pc);

    out.pros = f0_features(pc);
    double mean_int = 0;
    for (double v : ic.intensity_db) mean_int += v;
    out.pros.mean_intensity = ic.intensity_db.empty()
                                  ? 0.0
                                  : mean_int / double(ic.intensity_db.size());
    rhythm_features(nt, clip.duration(), out.pros);

    jitter_features(pt, out.vq);
    shimmer_features(pt, out.vq);
    const HarmonicityResult h = harmonicity(clip, pc);
    out.vq.autocorr_mean = h.autocorr_mean;
    out.vq.nhr = h.nhr;
    out.vq.hnr_db = h.hnr_db;
    out.audio_valid = true;
  } catch (const DataError&) {
    // substantially unvoiced or too-short audio: zeroed features, flagged
    out.pros = ProsodyFeatures{};
    out.vq = VoiceQualityFeatures{};
    out.audio_valid = false;
  }
}

ExtractResult extract_corpus(const std::string& corpus_dir, FeatureSet set,
                             const DspBundle& dsp,
                             const std::optional<Sidecar>& sidecar, bool fit,
                             bool demographics) {
  const std::vector<SessionRecord> records = load_corpus(corpus_dir);
  if (records.empty()) throw DataError("extract: corpus has no sessions");

  ExtractResult result;

  // transcripts first: cheap, and vocabulary fitting needs all of them
  std::vector<std::optional<Transcript>> transcripts(records.size());
  std::vector<std::string> skip_reason(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      transcripts[i] = parse_chat_file(records[i].transcript_path,
                                       records[i].meta.session_id);
    } catch (const std::exception& e) {
      skip_reason[i] = e.what();
    }
  }

  if (fit) {
    std::vector<Transcript> training;
    for (const auto& t : transcripts) {
      if (t) training.push_back(*t);
    }
    if (training.empty()) throw DataError("extract: no parseable transcripts to fit on");
    result.sidecar.vocab = build_vocabulary(training);
    int lo = 1 << 30, hi = -(1 << 30);
    for (const Transcript& t : training) {
      const int c = interviewer_turn_count(t);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    result.sidecar.inv_min = lo;
    result.sidecar.inv_max = hi;
  } else {
    if (!sidecar) throw DataError("extract: need a fitted sidecar (or --fit)");
    result.sidecar = *sidecar;
  }

  // per-session acoustic + lexical features; sessions run in parallel and
  // write into their own slots
  std::vector<std::optional<SessionFeatures>> features(records.size());
  for_index(records.size(), dsp.parallel, [&](std::size_t i) {
    if (!skip_reason[i].empty()) return;
    try {
      SessionFeatures sf;
      const AudioClip clip = load_wav(records[i].audio_path);
      DspBundle inner = dsp;
      inner.parallel = false;  // sessions are already parallel
      compute_acoustics(clip, inner, sf);
      sf.lex.word_scores = lexical_scores(*transcripts[i], result.sidecar.vocab);
      sf.lex.inv_turns_norm = normalize_inv_turns(
          interviewer_turn_count(*transcripts[i]), result.sidecar.inv_min,
          result.sidecar.inv_max);
      sf.age = records[i].meta.age;
      sf.gender = records[i].meta.gender == Gender::male ? 1.0 : 0.0;
      features[i] = std::move(sf);
    } catch (const std::exception& e) {
      skip_reason[i] = e.what();
    }
  });

  result.table.names = feature_names(set);
  if (!demographics) result.table.names.resize(result.table.names.size() - 2);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!features[i]) {
      result.warnings.push_back("skipped " + records[i].meta.session_id + ": " +
                                skip_reason[i]);
      continue;
    }
    FeatureRow row;
    row.session_id = records[i].meta.session_id;
    row.label = label_name(records[i].meta.label);
    row.mmse = records[i].meta.mmse;
    row.values = assemble(row.session_id, *features[i], set, demographics).values;
    row.audio_valid = features[i]->audio_valid;
    result.table.rows.push_back(std::move(row));
  }
  if (result.table.rows.empty()) {
    throw DataError("extract: every session failed; first: " +
                    (result.warnings.empty() ? "?" : result.warnings.front()));
  }
  return result;
}

}  // namespace adspeech
