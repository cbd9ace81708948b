#include "msacheck/remote.hpp"

#include <fstream>
#include <sstream>

#include "msacheck/error.hpp"
#include "msacheck/paths.hpp"
#include "msacheck/text.hpp"

namespace msacheck {

std::string_view to_string(PromptStyle s) {
  switch (s) {
    case PromptStyle::ZeroShot: return "zero_shot";
    case PromptStyle::CotZeroShot: return "cot_zero_shot";
    case PromptStyle::CotFewShot: return "cot_few_shot";
  }
  return "?";
}

std::optional<PromptStyle> parse_prompt_style(std::string_view s) {
  for (auto p : {PromptStyle::ZeroShot, PromptStyle::CotZeroShot, PromptStyle::CotFewShot}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

std::string template_id(PromptStyle style, Criterion c) {
  return std::string(to_string(style)) + "/" + std::string(to_string(c));
}

namespace {

std::pair<PromptStyle, Criterion> split_template_id(std::string_view id) {
  auto slash = id.find('/');
  if (slash != std::string_view::npos) {
    auto style = parse_prompt_style(id.substr(0, slash));
    auto crit = parse_criterion(id.substr(slash + 1));
    if (style && crit) return {*style, *crit};
  }
  throw Error(ErrorKind::ConfigError, "bad template id '" + std::string(id) + "'");
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::map<std::string, std::string> parse_sections(const std::string& body) {
  std::map<std::string, std::string> out;
  std::istringstream in(body);
  std::string line, current;
  while (std::getline(in, line)) {
    if (line.size() > 2 && line.front() == '[' && line.back() == ']') {
      current = line.substr(1, line.size() - 2);
      out[current];
      continue;
    }
    if (!current.empty()) out[current] += line + "\n";
  }
  for (auto& [k, v] : out) {
    while (!v.empty() && (v.back() == '\n' || v.back() == ' ')) v.pop_back();
  }
  return out;
}

}  // namespace

PromptStyle style_of_template(std::string_view id) { return split_template_id(id).first; }

bool parse_yes_no(std::string_view reply, bool require_final_answer) {
  auto as_decision = [](std::string_view token) -> std::optional<bool> {
    auto t = text::normalize_token(token);
    if (t == "yes") return true;
    if (t == "no") return false;
    return std::nullopt;
  };

  if (require_final_answer) {
    std::optional<bool> decision;
    std::istringstream in{std::string(reply)};
    std::string line;
    while (std::getline(in, line)) {
      auto lower = text::to_lower(line);
      auto pos = lower.find("final answer");
      if (pos == std::string::npos) continue;
      auto rest = std::string_view(line).substr(pos + 12);
      auto words = text::split_words(rest);
      // "Final Answer: YES", "**Final Answer**: NO", "Final Answer - yes"
      for (auto w : words) {
        if (text::normalize_token(w).empty()) continue;
        if (auto d = as_decision(w)) decision = d;
        break;
      }
    }
    if (!decision) throw Error(ErrorKind::MalformedReply, "no 'Final Answer: YES|NO' line in reply");
    return *decision;
  }

  auto words = text::split_words(reply);
  while (!words.empty() && text::normalize_token(words.back()).empty()) words.pop_back();
  if (!words.empty()) {
    if (auto d = as_decision(words.back())) return *d;
  }
  throw Error(ErrorKind::MalformedReply, "reply is not YES/NO: '" + std::string(reply.substr(0, 80)) + "'");
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  PromptLibrary lib;
  for (auto s : {PromptStyle::ZeroShot, PromptStyle::CotZeroShot, PromptStyle::CotFewShot}) {
    lib.frames_[s] = read_file(dir / (std::string(to_string(s)) + ".txt"));
  }
  for (auto c : kCriteria) {
    lib.sections_[c] = parse_sections(read_file(dir / "criteria" / (std::string(to_string(c)) + ".txt")));
  }
  return lib;
}

PromptLibrary PromptLibrary::load_default() { return load(data_dir() / "prompts"); }

std::string PromptLibrary::template_text(std::string_view id) const {
  auto [style, crit] = split_template_id(id);
  std::string out = frames_.at(style);
  for (const auto& [name, body] : sections_.at(crit)) {
    replace_all(out, "{{" + text::to_lower(name) + "}}", body);
  }
  if (out.find("{{") != std::string::npos) {
    throw Error(ErrorKind::ConfigError, "template " + std::string(id) + " has unfilled sections");
  }
  return out;
}

std::string PromptLibrary::render(std::string_view id, std::string_view target_sentence,
                                  std::string_view sentence_in_context) const {
  auto out = template_text(id);
  replace_all(out, "TARGET_SENTENCE", target_sentence);
  replace_all(out, "SENTENCE_IN_CONTEXT", sentence_in_context);
  return out;
}

RemoteYesNoBackend::RemoteYesNoBackend(const BackendDescriptor& d)
    : client_(d.endpoint, d.timeout_ms, d.max_in_flight, d.retries), template_ids_(d.template_ids) {
  d.validate();
}

double RemoteYesNoBackend::probability(Criterion c, std::string_view sentence,
                                       const ContextWindow& context) const {
  const auto& tid = template_ids_.at(c);
  nlohmann::json req = {{"criterion", to_string(c)},
                        {"target_sentence", sentence},
                        {"sentence_in_context", context.surround(sentence)},
                        {"template_id", tid}};
  auto res = client_.post(req);
  if (!res.is_object()) throw Error(ErrorKind::MalformedReply, "response is not an object");

  auto field = [&](const char* key) -> std::string {
    auto it = res.find(key);
    return (it != res.end() && it->is_string()) ? it->get<std::string>() : std::string();
  };
  const std::string answer = text::to_lower(text::trim(field("answer")));
  if (answer == "yes") return 1.0;
  if (answer == "no") return 0.0;

  const std::string raw = field("raw");
  const bool cot = style_of_template(tid) != PromptStyle::ZeroShot;
  if (raw.empty()) {
    // The answer field itself may hold the whole reply.
    return parse_yes_no(field("answer"), cot) ? 1.0 : 0.0;
  }
  return parse_yes_no(raw, cot) ? 1.0 : 0.0;
}

}  // namespace msacheck
