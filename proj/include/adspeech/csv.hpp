#pragma once

#include <string>
#include <vector>

namespace adspeech {

// Minimal comma-separated text I/O. Fields in this project never contain
// commas or quotes; the writer rejects them rather than quoting. Lines
// starting with '#' are artifact header comments and are skipped on read.
struct CsvDoc {
  std::vector<std::string> comments;  // leading '#' lines, without newline
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split_csv_line(const std::string& line);

CsvDoc read_csv(const std::string& path);

void write_csv(const std::string& path, const CsvDoc& doc);

// Formats a double with enough digits to round-trip feature values while
// staying byte-stable across runs.
std::string format_double(double v);

std::string join_csv(const std::vector<std::string>& fields);

}  // namespace adspeech
