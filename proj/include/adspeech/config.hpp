#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "adspeech/extract.hpp"
#include "adspeech/models.hpp"

namespace adspeech {

/// Key=value pipeline configuration. Every key has a documented default;
/// unknown keys are rejected so typos cannot silently fall back.
class PipelineConfig {
 public:
  PipelineConfig();  // defaults only

  /// Merges a config file (key=value lines, '#' comments) over defaults.
  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value);

  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::string get_string(const std::string& key) const;

  /// FNV-1a hash over the sorted effective configuration, hex encoded;
  /// echoed into artifact headers.
  std::string hash() const;

  DspBundle dsp_bundle() const;
  ModelConfig model_config(ModelKind kind, std::uint64_t seed) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace adspeech
