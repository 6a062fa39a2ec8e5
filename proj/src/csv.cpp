#include "adspeech/csv.hpp"

#include <cstdio>
#include <fstream>

#include "adspeech/error.hpp"

namespace adspeech {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

CsvDoc read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file: " + path);
  CsvDoc doc;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header && !line.empty() && line[0] == '#') {
      doc.comments.push_back(line);
      continue;
    }
    if (line.empty()) continue;
    if (!have_header) {
      doc.header = split_csv_line(line);
      have_header = true;
    } else {
      doc.rows.push_back(split_csv_line(line));
    }
  }
  if (!have_header) throw DataError("CSV file has no header: " + path);
  return doc;
}

std::string join_csv(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string& f = fields[i];
    if (f.find(',') != std::string::npos || f.find('"') != std::string::npos ||
        f.find('\n') != std::string::npos) {
      throw InternalError("CSV field contains a reserved character: " + f);
    }
    if (i) out.push_back(',');
    out += f;
  }
  return out;
}

void write_csv(const std::string& path, const CsvDoc& doc) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write CSV file: " + path);
  for (const auto& c : doc.comments) out << c << '\n';
  out << join_csv(doc.header) << '\n';
  for (const auto& row : doc.rows) out << join_csv(row) << '\n';
  if (!out) throw DataError("error while writing CSV file: " + path);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace adspeech
