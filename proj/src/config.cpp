#include "adspeech/config.hpp"

#include <cstdio>
#include <fstream>

#include "adspeech/error.hpp"

namespace adspeech {

namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> map = {
      {"dsp.pitch_floor_hz", "75"},
      {"dsp.pitch_ceiling_hz", "600"},
      {"dsp.frame_step_s", "0.0033"},
      {"dsp.pitch_window_s", "0.080"},
      {"dsp.voicing_threshold", "0.45"},
      {"dsp.octave_cost", "0.01"},
      {"dsp.octave_jump_cost", "0.35"},
      {"dsp.voiced_unvoiced_cost", "0.14"},
      {"dsp.max_candidates", "4"},
      {"dsp.intensity_window_s", "0.032"},
      {"dsp.silence_threshold_db", "25"},
      {"dsp.nucleus_dip_db", "2"},
      {"dsp.min_pause_s", "0.100"},
      {"features.demographics", "true"},
      {"stats.pooled_variance", "false"},
      {"stats.alpha", "0.05"},
      {"cv.folds", "10"},
      {"cv.stratify", "true"},
      {"rf.trees", "100"},
      {"rf.max_depth", "0"},
      {"rf.min_split", "2"},
      {"rf.mtry", "0"},
      {"rf.bootstrap", "true"},
      {"knn.k", "5"},
      {"svm.c", "1.0"},
      {"svm.degree", "3"},
      {"svm.coef0", "0.0"},
      {"svm.tol", "0.001"},
      {"svm.max_passes", "10"},
      {"svr.epsilon", "0.1"},
      {"mlp.hidden", "2"},
      {"mlp.lr", "0.1"},
      {"mlp.momentum", "0.2"},
      {"mlp.epochs", "500"},
      {"linreg.lr0", "0.01"},
      {"linreg.l2", "0.0001"},
      {"linreg.epochs", "1000"},
      {"synth.sample_rate", "16000"},
      {"run.parallel", "true"},
  };
  return map;
}

}  // namespace

PipelineConfig::PipelineConfig() : values_(defaults()) {}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (defaults().find(key) == defaults().end()) {
    throw UsageError("unknown config key: " + key);
  }
  values_[key] = value;
}

void PipelineConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("config file not found: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const std::size_t eq = line.find('=', start);
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const std::size_t a = s.find_first_not_of(" \t");
      const std::size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    try {
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::string PipelineConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw InternalError("config key not registered: " + key);
  return it->second;
}

double PipelineConfig::get_double(const std::string& key) const {
  try {
    return std::stod(get_string(key));
  } catch (const std::exception&) {
    throw UsageError("config key " + key + " is not numeric");
  }
}

int PipelineConfig::get_int(const std::string& key) const {
  try {
    return std::stoi(get_string(key));
  } catch (const std::exception&) {
    throw UsageError("config key " + key + " is not an integer");
  }
}

bool PipelineConfig::get_bool(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("config key " + key + " is not a boolean");
}

std::string PipelineConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& [k, v] : values_) {
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

DspBundle PipelineConfig::dsp_bundle() const {
  DspBundle dsp;
  dsp.pitch.floor_hz = get_double("dsp.pitch_floor_hz");
  dsp.pitch.ceiling_hz = get_double("dsp.pitch_ceiling_hz");
  dsp.pitch.step_s = get_double("dsp.frame_step_s");
  dsp.pitch.window_s = get_double("dsp.pitch_window_s");
  dsp.pitch.voicing_threshold = get_double("dsp.voicing_threshold");
  dsp.pitch.octave_cost = get_double("dsp.octave_cost");
  dsp.pitch.octave_jump_cost = get_double("dsp.octave_jump_cost");
  dsp.pitch.voiced_unvoiced_cost = get_double("dsp.voiced_unvoiced_cost");
  dsp.pitch.max_candidates = get_int("dsp.max_candidates");
  dsp.intensity.window_s = get_double("dsp.intensity_window_s");
  dsp.intensity.step_s = get_double("dsp.frame_step_s");
  dsp.nucleus.silence_threshold_db = get_double("dsp.silence_threshold_db");
  dsp.nucleus.dip_db = get_double("dsp.nucleus_dip_db");
  dsp.nucleus.min_pause_s = get_double("dsp.min_pause_s");
  dsp.parallel = get_bool("run.parallel");
  return dsp;
}

ModelConfig PipelineConfig::model_config(ModelKind kind, std::uint64_t seed) const {
  ModelConfig c;
  c.kind = kind;
  c.seed = seed;
  c.trees = get_int("rf.trees");
  c.max_depth = get_int("rf.max_depth");
  c.min_split = get_int("rf.min_split");
  c.mtry = get_int("rf.mtry");
  c.bootstrap = get_bool("rf.bootstrap");
  c.rf_parallel = get_bool("run.parallel");
  c.k = get_int("knn.k");
  c.c = get_double("svm.c");
  c.degree = get_int("svm.degree");
  c.coef0 = get_double("svm.coef0");
  c.tol = get_double("svm.tol");
  c.max_passes = get_int("svm.max_passes");
  c.epsilon = get_double("svr.epsilon");
  c.hidden = get_int("mlp.hidden");
  c.lr = get_double("mlp.lr");
  c.momentum = get_double("mlp.momentum");
  c.epochs = get_int("mlp.epochs");
  c.lr0 = get_double("linreg.lr0");
  c.l2 = get_double("linreg.l2");
  c.sgd_epochs = get_int("linreg.epochs");
  return c;
}

}  // namespace adspeech
