#include "adspeech/chat.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "adspeech/error.hpp"

namespace adspeech {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool has_alnum(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c); });
}

bool all_dots(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c == '.'; });
}

// One appended unit of the normalize fold: either a single word or the
// token group a retrace marker may erase.
struct Unit {
  std::size_t first_token;
};

}  // namespace

std::vector<std::string> normalize_tokens(const std::string& raw) {
  // Strip timing-bullet spans (U+0015 ... U+0015) without interpreting them.
  std::string text;
  text.reserve(raw.size());
  bool in_bullet = false;
  for (char c : raw) {
    if (c == '\x15') {
      in_bullet = !in_bullet;
      continue;
    }
    if (!in_bullet) text.push_back(c);
  }

  std::vector<std::string> tokens;
  std::vector<Unit> units;

  auto pop_unit = [&]() {
    if (units.empty()) return;
    tokens.resize(units.back().first_token);
    units.pop_back();
  };

  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    unsigned char c = text[i];
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c == '[') {
      std::size_t close = text.find(']', i);
      if (close == std::string::npos) {
        throw DataError("unbalanced '[' markup at offset " + std::to_string(i));
      }
      std::string body = text.substr(i + 1, close - i - 1);
      if (body == "/" || body == "//" || body == "///") {
        pop_unit();  // retracing: keep the final form only
      }
      // other bracket annotations ([% ...] comments etc.) are dropped
      i = close + 1;
      continue;
    }
    if (c == ']') {
      throw DataError("unbalanced ']' markup at offset " + std::to_string(i));
    }
    if (c == '<') {
      std::size_t close = text.find('>', i);
      if (close == std::string::npos) {
        throw DataError("unbalanced '<' markup at offset " + std::to_string(i));
      }
      // The group is one unit: a following retrace marker erases all of it.
      units.push_back({tokens.size()});
      std::istringstream group(text.substr(i + 1, close - i - 1));
      std::string w;
      while (group >> w) {
        std::string t = lower(w);
        std::string clean;
        for (char ch : t) {
          if (ch != '(' && ch != ')') clean.push_back(ch);
        }
        if (has_alnum(clean)) tokens.push_back(clean);
      }
      i = close + 1;
      continue;
    }
    // plain word up to whitespace or markup
    std::size_t end = i;
    while (end < n && !std::isspace(static_cast<unsigned char>(text[end])) &&
           text[end] != '[' && text[end] != '<') {
      ++end;
    }
    std::string word = text.substr(i, end - i);
    i = end;

    if (word.empty()) continue;
    if (word[0] == '&') continue;  // events &=, fillers &-, legacy &
    if (word.size() >= 2 && word.front() == '(' && word.back() == ')' &&
        all_dots(word.substr(1, word.size() - 2))) {
      continue;  // pause marks (.), (..), (...)
    }
    // parenthesized completions: (be)cause -> because
    std::string expanded;
    int open_parens = 0;
    for (char ch : word) {
      if (ch == '(') {
        ++open_parens;
      } else if (ch == ')') {
        --open_parens;
      } else {
        expanded.push_back(ch);
      }
    }
    (void)open_parens;
    std::string t = lower(expanded);
    if (!has_alnum(t)) continue;  // terminal punctuation and symbol tokens
    units.push_back({tokens.size()});
    tokens.push_back(t);
  }
  return tokens;
}

bool is_content_pos(const std::string& pos) {
  if (pos == "n" || (pos.size() > 2 && pos.compare(0, 2, "n:") == 0)) {
    return pos.compare(0, 6, "n:prop") != 0;
  }
  if (pos == "adj" || pos.compare(0, 4, "adj:") == 0) return true;
  if (pos == "v" || pos.compare(0, 2, "v:") == 0) return true;
  if (pos == "part") return true;
  return false;  // aux, cop and everything else carry no picture content
}

namespace {

std::vector<MorTag> parse_mor_items(const std::string& body) {
  std::vector<MorTag> tags;
  std::istringstream in(body);
  std::string item;
  while (in >> item) {
    std::size_t bar = item.find('|');
    if (bar == std::string::npos) continue;  // punctuation entries
    MorTag tag;
    tag.pos = item.substr(0, bar);
    std::string rest = item.substr(bar + 1);
    std::size_t cut = rest.find_first_of("-&=~");
    tag.lemma = lower(cut == std::string::npos ? rest : rest.substr(0, cut));
    tags.push_back(std::move(tag));
  }
  return tags;
}

struct RawTier {
  std::string code;  // speaker code or dependent tier name
  bool dependent = false;
  std::string body;
  int line_no = 0;
};

}  // namespace

Transcript parse_chat(const std::string& text, const std::string& session_id) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }

  bool saw_begin = false, saw_end = false;
  std::vector<std::string> declared_codes;
  std::vector<RawTier> tiers;
  std::ptrdiff_t open_tier = -1;

  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    const int line_no = static_cast<int>(li) + 1;
    if (line.empty()) {
      open_tier = -1;
      continue;
    }
    if (line[0] == '\t') {
      if (open_tier < 0) {
        throw DataError("line " + std::to_string(line_no) +
                        ": continuation line with no open tier");
      }
      tiers[open_tier].body += " " + line.substr(1);
      continue;
    }
    open_tier = -1;
    if (saw_end) continue;  // material after @End is ignored
    if (line[0] == '@') {
      std::size_t colon = line.find(':');
      std::string header = colon == std::string::npos ? line : line.substr(0, colon);
      if (header == "@Begin") {
        saw_begin = true;
      } else if (header == "@End") {
        saw_end = true;
      } else if (header == "@Participants") {
        std::string body = colon == std::string::npos ? "" : line.substr(colon + 1);
        std::istringstream groups(body);
        std::string group;
        while (std::getline(groups, group, ',')) {
          std::istringstream words(group);
          std::string code;
          if (words >> code) declared_codes.push_back(code);
        }
      }
      // other headers are consumed without interpretation
      continue;
    }
    if (line[0] == '*' || line[0] == '%') {
      if (!saw_begin) {
        throw DataError("line " + std::to_string(line_no) +
                        ": tier before @Begin (missing @Begin?)");
      }
      std::size_t colon = line.find(':');
      if (colon == std::string::npos || colon < 2) {
        throw DataError("line " + std::to_string(line_no) + ": malformed tier line");
      }
      RawTier tier;
      tier.dependent = line[0] == '%';
      tier.code = line.substr(1, colon - 1);
      tier.body = line.substr(colon + 1);
      if (!tier.body.empty() && tier.body[0] == '\t') tier.body.erase(0, 1);
      tier.line_no = line_no;
      if (!tier.dependent) {
        if (std::find(declared_codes.begin(), declared_codes.end(), tier.code) ==
            declared_codes.end()) {
          throw DataError("line " + std::to_string(line_no) + ": speaker code " +
                          tier.code + " not declared by a preceding @Participants");
        }
      }
      tiers.push_back(std::move(tier));
      open_tier = static_cast<std::ptrdiff_t>(tiers.size()) - 1;
      continue;
    }
    throw DataError("line " + std::to_string(line_no) + ": unrecognized line");
  }

  if (!saw_begin) throw DataError("missing @Begin");
  if (!saw_end) throw DataError("missing @End");

  Transcript t;
  t.session_id = session_id;
  for (const RawTier& tier : tiers) {
    if (tier.dependent) {
      if (t.utterances.empty()) {
        throw DataError("line " + std::to_string(tier.line_no) + ": dependent tier %" +
                        tier.code + " with no preceding main tier");
      }
      if (tier.code == "mor") {
        Utterance& u = t.utterances.back();
        std::vector<MorTag> tags = parse_mor_items(tier.body);
        if (tags.size() == u.tokens.size()) u.mor = std::move(tags);
      }
      continue;
    }
    Utterance u;
    u.turn_index = static_cast<int>(t.utterances.size()) + 1;
    u.speaker_code = tier.code;
    u.speaker = tier.code == "PAR"   ? Speaker::par
                : tier.code == "INV" ? Speaker::inv
                                     : Speaker::other;
    try {
      u.tokens = normalize_tokens(tier.body);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(tier.line_no) + ": " + e.what());
    }
    t.utterances.push_back(std::move(u));
  }
  if (t.utterances.empty()) throw DataError("no utterances");
  return t;
}

Transcript parse_chat_file(const std::string& path, const std::string& session_id) {
  std::ifstream in(path);
  if (!in) throw DataError("transcript file not found: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_chat(buf.str(), session_id);
}

int interviewer_turn_count(const Transcript& t) {
  return static_cast<int>(std::count_if(
      t.utterances.begin(), t.utterances.end(),
      [](const Utterance& u) { return u.speaker == Speaker::inv; }));
}

std::string to_chat(const Transcript& t) {
  std::ostringstream out;
  out << "@Begin\n";
  std::vector<std::string> codes;
  for (const Utterance& u : t.utterances) {
    if (std::find(codes.begin(), codes.end(), u.speaker_code) == codes.end()) {
      codes.push_back(u.speaker_code);
    }
  }
  out << "@Participants:";
  for (std::size_t i = 0; i < codes.size(); ++i) {
    out << (i ? ", " : "\t") << codes[i] << " Speaker";
  }
  out << "\n";
  for (const Utterance& u : t.utterances) {
    out << "*" << u.speaker_code << ":\t";
    for (std::size_t i = 0; i < u.tokens.size(); ++i) {
      if (i) out << ' ';
      out << u.tokens[i];
    }
    out << " .\n";
    if (u.mor) {
      out << "%mor:\t";
      for (std::size_t i = 0; i < u.mor->size(); ++i) {
        if (i) out << ' ';
        out << (*u.mor)[i].pos << '|' << (*u.mor)[i].lemma;
      }
      out << " .\n";
    }
  }
  out << "@End\n";
  return out.str();
}

std::string canonical_dump(const Transcript& t) {
  std::ostringstream out;
  out << "transcript " << t.session_id << " turns " << t.n_turns() << "\n";
  for (const Utterance& u : t.utterances) {
    out << u.turn_index << '|' << u.speaker_code << '|';
    for (std::size_t i = 0; i < u.tokens.size(); ++i) {
      if (i) out << ' ';
      out << u.tokens[i];
    }
    out << '|';
    if (u.mor) {
      for (std::size_t i = 0; i < u.mor->size(); ++i) {
        if (i) out << ' ';
        out << (*u.mor)[i].pos << '|' << (*u.mor)[i].lemma;
      }
    } else {
      out << '-';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace adspeech
