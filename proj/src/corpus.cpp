#include "msacheck/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include <json.hpp>

#include "msacheck/error.hpp"
#include "msacheck/text.hpp"

namespace msacheck {

using text::is_space;

std::string_view to_string(Sector s) {
  switch (s) {
    case Sector::IndustryInfrastructure: return "IndustryInfrastructure";
    case Sector::CommerceServices: return "CommerceServices";
    case Sector::PublicHealthcare: return "PublicHealthcare";
    case Sector::Other: return "Other";
  }
  return "?";
}

std::string_view to_string(TurnoverBand b) {
  switch (b) {
    case TurnoverBand::Below36M: return "<36M";
    case TurnoverBand::From36To100M: return "36-100M";
    case TurnoverBand::From100To500M: return "100-500M";
    case TurnoverBand::Above500M: return ">500M";
  }
  return "?";
}

std::optional<Sector> parse_sector(std::string_view s) {
  for (auto v : kSectors) {
    if (to_string(v) == s) return v;
  }
  if (s == "Industry & Infrastructure") return Sector::IndustryInfrastructure;
  if (s == "Commerce & Services") return Sector::CommerceServices;
  if (s == "Public & Healthcare") return Sector::PublicHealthcare;
  return std::nullopt;
}

std::optional<TurnoverBand> parse_turnover_band(std::string_view s) {
  for (auto v : kTurnoverBands) {
    if (to_string(v) == s) return v;
  }
  if (s == "Below36M") return TurnoverBand::Below36M;
  if (s == "From36To100M") return TurnoverBand::From36To100M;
  if (s == "From100To500M") return TurnoverBand::From100To500M;
  if (s == "Above500M") return TurnoverBand::Above500M;
  return std::nullopt;
}

void StatementMetadata::validate() const {
  if (publication_year && *publication_year < kEarliestPublicationYear) {
    throw Error(ErrorKind::InvalidArgument,
                "publication_year " + std::to_string(*publication_year) + " predates 2015");
  }
}

std::string ContextWindow::surround(std::string_view target) const {
  std::string out;
  if (!before_text.empty()) {
    out += before_text;
    out += ' ';
  }
  out += target;
  if (!after_text.empty()) {
    out += ' ';
    out += after_text;
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 30> kAbbreviations = {
    "Ltd.",  "LTD.", "Inc.",   "INC.", "plc.", "Plc.",   "PLC.", "No.",    "Nos.", "U.K.",
    "U.S.",  "UK.",  "U.S.A.", "Co.",  "Pty.", "PTY.",   "Corp.", "Mr.",   "Mrs.", "Ms.",
    "Dr.",   "St.",  "e.g.",   "i.e.", "vs.",  "approx.", "Jan.", "Feb.",  "Aug.", "Sept.",
};

// UTF-8 bullet glyphs: bullet, black small square, white bullet, black circle.
constexpr std::array<std::string_view, 4> kBulletGlyphs = {"\xE2\x80\xA2", "\xE2\x96\xAA",
                                                           "\xE2\x97\xA6", "\xE2\x97\x8F"};

constexpr std::array<std::string_view, 2> kUtf8Closers = {"\xE2\x80\x99", "\xE2\x80\x9D"};
constexpr std::array<std::string_view, 2> kUtf8Openers = {"\xE2\x80\x98", "\xE2\x80\x9C"};

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Length of a list marker starting at k, 0 when there is none.
std::size_t bullet_at(std::string_view t, std::size_t k) {
  const std::size_t n = t.size();
  if (k >= n) return 0;
  if ((t[k] == '-' || t[k] == '*') && k + 1 < n && is_space(t[k + 1])) return 1;
  for (auto g : kBulletGlyphs) {
    if (t.substr(k).starts_with(g)) return g.size();
  }
  std::size_t j = k;
  while (j < n && j - k < 3 && is_digit(t[j])) ++j;
  if (j > k && j + 1 < n && (t[j] == '.' || t[j] == ')') && is_space(t[j + 1])) return j - k + 1;
  return 0;
}

bool at_line_start(std::string_view t, std::size_t pos) {
  while (pos > 0) {
    char c = t[pos - 1];
    if (c == '\n') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
    --pos;
  }
  return true;
}

std::size_t token_start(std::string_view t, std::size_t pos) {
  while (pos > 0 && !is_space(t[pos - 1])) --pos;
  return pos;
}

bool starts_sentence(std::string_view t, std::size_t k) {
  char c = t[k];
  if (is_upper(c) || is_digit(c)) return true;
  if (bullet_at(t, k)) return true;
  if ((c == '"' || c == '\'' || c == '(' || c == '[') && k + 1 < t.size() && is_upper(t[k + 1])) {
    return true;
  }
  for (auto o : kUtf8Openers) {
    if (t.substr(k).starts_with(o) && k + o.size() < t.size() && is_upper(t[k + o.size()])) {
      return true;
    }
  }
  return false;
}

std::size_t skip_closers(std::string_view t, std::size_t j) {
  for (;;) {
    if (j < t.size() && (t[j] == '"' || t[j] == '\'' || t[j] == ')' || t[j] == ']')) {
      ++j;
      continue;
    }
    bool advanced = false;
    for (auto c : kUtf8Closers) {
      if (t.substr(j).starts_with(c)) {
        j += c.size();
        advanced = true;
        break;
      }
    }
    if (!advanced) return j;
  }
}

bool has_letter(std::string_view s) {
  for (auto w : text::split_words(s)) {
    for (unsigned char c : text::normalize_token(w)) {
      if (std::isalpha(c) || c >= 0x80) return true;
    }
  }
  return false;
}

// Positions where a new sentence may begin.
std::vector<std::size_t> find_cuts(std::string_view t) {
  std::vector<std::size_t> cuts;
  const std::size_t n = t.size();
  for (std::size_t i = 0; i < n; ++i) {
    const char c = t[i];
    if (c == '\n') {
      std::size_t k = i + 1;
      while (k < n && is_space(t[k])) ++k;
      if (k < n && bullet_at(t, k)) cuts.push_back(k);
      continue;
    }
    if (!is_terminal(c)) continue;
    if (i + 1 < n && is_terminal(t[i + 1])) continue;  // only the last of "?!" / "..."

    const std::size_t tok = token_start(t, i);
    const std::string_view token = t.substr(tok, i + 1 - tok);
    if (c == '.') {
      const bool numeric = token.size() > 1 &&
                           std::all_of(token.begin(), token.end() - 1, is_digit);
      if (numeric && at_line_start(t, tok)) continue;  // "1." list marker
    }

    std::size_t j = skip_closers(t, i + 1);
    if (j >= n || !is_space(t[j])) continue;
    std::size_t k = j;
    while (k < n && is_space(t[k])) ++k;
    if (k == n) continue;
    if (c == '.' &&
        std::find(kAbbreviations.begin(), kAbbreviations.end(), token) != kAbbreviations.end()) {
      continue;
    }
    if (starts_sentence(t, k)) cuts.push_back(k);
  }
  return cuts;
}

}  // namespace

std::vector<Sentence> segment(std::string_view raw_text) {
  auto cuts = find_cuts(raw_text);
  cuts.insert(cuts.begin(), 0);
  cuts.push_back(raw_text.size());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Span> spans;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    std::size_t b = cuts[i], e = cuts[i + 1];
    while (b < e && is_space(raw_text[b])) ++b;
    while (e > b && is_space(raw_text[e - 1])) --e;
    if (b < e) spans.push_back({b, e});
  }
  if (spans.empty()) throw Error(ErrorKind::EmptyDocument, "no sentence found");

  // Letterless fragments merge into the following span (the previous one at
  // the end of the text).
  std::vector<Span> merged;
  std::optional<std::size_t> carry;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    Span s = spans[i];
    if (carry) {
      s.start = *carry;
      carry.reset();
    }
    const bool letterless = !has_letter(raw_text.substr(s.start, s.end - s.start));
    if (letterless && i + 1 < spans.size()) {
      carry = s.start;
      continue;
    }
    if (letterless && !merged.empty()) {
      merged.back().end = s.end;
      continue;
    }
    merged.push_back(s);
  }

  std::vector<Sentence> out;
  out.reserve(merged.size());
  for (const auto& s : merged) {
    Sentence sent;
    sent.index = out.size();
    sent.span = s;
    sent.text = std::string(raw_text.substr(s.start, s.end - s.start));
    sent.word_count = text::count_words(sent.text);
    out.push_back(std::move(sent));
  }
  return out;
}

std::string content_id(std::string_view raw_text) {
  return "st-" + text::hex64(text::fnv1a64(raw_text));
}

Statement ingest_statement(std::string raw_text, StatementMetadata metadata,
                           std::optional<std::string> id) {
  metadata.validate();
  Statement st;
  st.sentences = segment(raw_text);
  if (st.sentences.size() > kMaxSentences) {
    throw Error(ErrorKind::TooLong, std::to_string(st.sentences.size()) +
                                        " sentences exceeds the limit of " +
                                        std::to_string(kMaxSentences));
  }
  st.id = (id && !id->empty()) ? std::move(*id) : content_id(raw_text);
  st.raw_text = std::move(raw_text);
  st.metadata = std::move(metadata);
  return st;
}

ContextWindow build_context(const Statement& statement, std::size_t target_index,
                            std::size_t budget) {
  if (target_index >= statement.sentences.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "sentence index " + std::to_string(target_index) +
                                                " out of range (" +
                                                std::to_string(statement.sentences.size()) + ")");
  }
  ContextWindow w;
  w.target_index = target_index;
  w.budget = budget;
  if (budget == 0) return w;

  std::vector<std::string_view> before, after;
  for (std::size_t i = 0; i < target_index; ++i) {
    auto ws = text::split_words(statement.sentences[i].text);
    before.insert(before.end(), ws.begin(), ws.end());
  }
  for (std::size_t i = target_index + 1; i < statement.sentences.size(); ++i) {
    auto ws = text::split_words(statement.sentences[i].text);
    after.insert(after.end(), ws.begin(), ws.end());
    if (after.size() >= budget) break;
  }

  // Balanced split; a boundary-limited side spills its deficit to the other.
  std::size_t nb = std::min(before.size(), budget / 2);
  std::size_t na = std::min(after.size(), budget - nb);
  nb = std::min(before.size(), budget - na);

  using Words = std::vector<std::string_view>;
  w.before_text = text::join(Words(before.end() - static_cast<std::ptrdiff_t>(nb), before.end()));
  w.after_text = text::join(Words(after.begin(), after.begin() + static_cast<std::ptrdiff_t>(na)));
  return w;
}

StatementInput parse_statement_input(std::string_view json_line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MalformedInput, e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::MalformedInput, "statement record is not an object");

  auto str_field = [&](const char* key) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) {
      throw Error(ErrorKind::MalformedInput, std::string("field '") + key + "' must be a string");
    }
    return it->get<std::string>();
  };

  StatementInput in;
  in.id = str_field("id");
  auto text_field = str_field("text");
  if (!text_field) throw Error(ErrorKind::MalformedInput, "missing 'text'");
  in.text = std::move(*text_field);

  auto jur = str_field("jurisdiction");
  if (!jur) throw Error(ErrorKind::MalformedInput, "missing 'jurisdiction'");
  auto parsed_j = parse_jurisdiction(*jur);
  if (!parsed_j) throw Error(ErrorKind::MalformedInput, "unknown jurisdiction '" + *jur + "'");
  in.metadata.jurisdiction = *parsed_j;

  if (auto s = str_field("sector")) {
    in.metadata.sector = parse_sector(*s);
    if (!in.metadata.sector) throw Error(ErrorKind::MalformedInput, "unknown sector '" + *s + "'");
  }
  if (auto b = str_field("turnover_band")) {
    in.metadata.turnover_band = parse_turnover_band(*b);
    if (!in.metadata.turnover_band) {
      throw Error(ErrorKind::MalformedInput, "unknown turnover_band '" + *b + "'");
    }
  }
  if (auto it = j.find("year"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw Error(ErrorKind::MalformedInput, "'year' must be an integer");
    in.metadata.publication_year = it->get<int>();
  }
  if (auto c = str_field("company_id")) in.metadata.company_id = *c;
  return in;
}

}  // namespace msacheck
