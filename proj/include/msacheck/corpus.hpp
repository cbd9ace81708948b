#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msacheck/criteria.hpp"

namespace msacheck {

enum class Sector { IndustryInfrastructure, CommerceServices, PublicHealthcare, Other };

// Annual turnover bands in GBP millions. Below36M is the band under the UK
// reporting threshold.
enum class TurnoverBand { Below36M, From36To100M, From100To500M, Above500M };

inline constexpr std::array<Sector, 4> kSectors = {Sector::IndustryInfrastructure,
                                                   Sector::CommerceServices,
                                                   Sector::PublicHealthcare, Sector::Other};
inline constexpr std::array<TurnoverBand, 4> kTurnoverBands = {
    TurnoverBand::Below36M, TurnoverBand::From36To100M, TurnoverBand::From100To500M,
    TurnoverBand::Above500M};

std::string_view to_string(Sector s);
std::string_view to_string(TurnoverBand b);
// Accept the enum names plus the human labels ("Industry & Infrastructure",
// "<36M", "36-100M", ...).
std::optional<Sector> parse_sector(std::string_view s);
std::optional<TurnoverBand> parse_turnover_band(std::string_view s);

inline constexpr int kEarliestPublicationYear = 2015;
inline constexpr std::size_t kMaxSentences = 200;

struct StatementMetadata {
  Jurisdiction jurisdiction = Jurisdiction::AU;
  std::optional<Sector> sector;
  std::optional<TurnoverBand> turnover_band;
  std::optional<int> publication_year;
  std::string company_id;

  void validate() const;  // throws InvalidArgument
  bool operator==(const StatementMetadata&) const = default;
};

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  bool operator==(const Span&) const = default;
};

struct Sentence {
  std::size_t index = 0;
  Span span;
  std::string text;
  std::size_t word_count = 0;
  bool operator==(const Sentence&) const = default;
};

struct Statement {
  std::string id;
  std::string raw_text;
  std::vector<Sentence> sentences;
  StatementMetadata metadata;
  bool operator==(const Statement&) const = default;
};

struct ContextWindow {
  std::size_t target_index = 0;
  std::string before_text;
  std::string after_text;
  std::size_t budget = 0;

  // before + target + after, the block a remote classifier sees.
  std::string surround(std::string_view target) const;
  bool operator==(const ContextWindow&) const = default;
};

// Rule-based splitter: terminal punctuation followed by whitespace and an
// uppercase letter, digit, bullet or end of text; newline + bullet marker;
// abbreviation guard; letterless fragments merge forward.
std::vector<Sentence> segment(std::string_view raw_text);

// Content-hash identifier used when a statement arrives without an id.
std::string content_id(std::string_view raw_text);

Statement ingest_statement(std::string raw_text, StatementMetadata metadata,
                           std::optional<std::string> id = std::nullopt);

ContextWindow build_context(const Statement& statement, std::size_t target_index,
                            std::size_t budget);

// One JSONL input record, before segmentation.
struct StatementInput {
  std::optional<std::string> id;
  std::string text;
  StatementMetadata metadata;
};

StatementInput parse_statement_input(std::string_view json_line);  // throws MalformedInput

}  // namespace msacheck
