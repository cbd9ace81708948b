#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "msacheck/backend.hpp"
#include "msacheck/transport.hpp"

namespace msacheck {

enum class PromptStyle { ZeroShot, CotZeroShot, CotFewShot };

std::string_view to_string(PromptStyle s);
std::optional<PromptStyle> parse_prompt_style(std::string_view s);

// Template ids look like "<style>/<criterion>", e.g. "cot_few_shot/C2_SupplyChains".
std::string template_id(PromptStyle style, Criterion c);
PromptStyle style_of_template(std::string_view template_id);  // throws ConfigError

// Maps a model reply to a decision. Chain-of-thought replies must carry a
// "Final Answer: YES|NO" line (the last one wins); otherwise the reply must
// end in a YES/NO token. Case-insensitive. Throws MalformedReply.
bool parse_yes_no(std::string_view reply, bool require_final_answer);

// Renders classification prompts from the frame + per-criterion assets under
// <data>/prompts. Placeholders TARGET_SENTENCE and SENTENCE_IN_CONTEXT are
// left in the template and substituted by render().
class PromptLibrary {
 public:
  static PromptLibrary load(const std::filesystem::path& prompts_dir);
  static PromptLibrary load_default();

  std::string template_text(std::string_view template_id) const;
  std::string render(std::string_view template_id, std::string_view target_sentence,
                     std::string_view sentence_in_context) const;

 private:
  std::map<PromptStyle, std::string> frames_;
  std::map<Criterion, std::map<std::string, std::string>> sections_;
};

// Remote YES/NO classifier speaking the JSON protocol
//   request  {criterion, target_sentence, sentence_in_context, template_id}
//   response {answer: "YES"|"NO", raw}
class RemoteYesNoBackend final : public RelevanceBackend {
 public:
  explicit RemoteYesNoBackend(const BackendDescriptor& descriptor);

  std::string id() const override { return "remote-yesno:" + client_.url(); }
  BackendKind kind() const override { return BackendKind::RemoteYesNo; }
  double probability(Criterion c, std::string_view sentence,
                     const ContextWindow& context) const override;
  std::size_t max_concurrency() const override { return client_.max_in_flight(); }

 private:
  HttpJsonClient client_;
  std::map<Criterion, std::string> template_ids_;
};

}  // namespace msacheck
