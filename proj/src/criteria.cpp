#include "msacheck/criteria.hpp"

#include <string>

#include "msacheck/error.hpp"

namespace msacheck {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::EmptyDocument: return "EmptyDocument";
    case ErrorKind::TooLong: return "TooLong";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::IncompleteMapping: return "IncompleteMapping";
    case ErrorKind::DegenerateHead: return "DegenerateHead";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::MalformedReply: return "MalformedReply";
    case ErrorKind::TooManyTokens: return "TooManyTokens";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NotRelevant: return "NotRelevant";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::EmptySlice: return "EmptySlice";
    case ErrorKind::MissingMetadata: return "MissingMetadata";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::VersionConflict: return "VersionConflict";
    case ErrorKind::UnknownTarget: return "UnknownTarget";
    case ErrorKind::StaleRevision: return "StaleRevision";
    case ErrorKind::InvalidDetermination: return "InvalidDetermination";
  }
  return "Unknown";
}

std::optional<ErrorKind> parse_error_kind(std::string_view name) {
  for (int k = 0; k <= static_cast<int>(ErrorKind::InvalidDetermination); ++k) {
    if (to_string(static_cast<ErrorKind>(k)) == name) return static_cast<ErrorKind>(k);
  }
  return std::nullopt;
}

namespace {

constexpr std::array<CriterionInfo, kCriterionCount> kInfo = {{
    {Criterion::Approval, "Approval", "Approval",
     "Did the board or equivalent governing body approve the statement?"},
    {Criterion::Signature, "Signature", "Signature",
     "Was the statement signed by a director or other accountable officer?"},
    {Criterion::C2_Structure, "C2_Structure", "C2 (structure)",
     "Is the organisation's legal and ownership structure set out?"},
    {Criterion::C2_Operations, "C2_Operations", "C2 (operations)",
     "Are the organisation's activities, sites or markets set out?"},
    {Criterion::C2_SupplyChains, "C2_SupplyChains", "C2 (supply chains)",
     "Are the organisation's suppliers and sourcing set out?"},
    {Criterion::C3_RiskDescription, "C3_RiskDescription", "C3 (risk description)",
     "Are specific forced-labour risks in operations or sourcing named?"},
    {Criterion::C4_RiskMitigation, "C4_RiskMitigation", "C4 (risk mitigation)",
     "Are concrete measures to find and reduce forced-labour risk reported?"},
    {Criterion::C4_Remediation, "C4_Remediation", "C4 (remediation)",
     "Are steps to put right harm to affected workers reported?"},
    {Criterion::C5_Effectiveness, "C5_Effectiveness", "C5 (effectiveness)",
     "Is there a method for checking whether those measures work?"},
}};

}  // namespace

const CriterionInfo& info(Criterion c) { return kInfo[index_of(c)]; }

std::string_view to_string(Criterion c) { return info(c).name; }

std::optional<Criterion> parse_criterion(std::string_view name) {
  for (const auto& i : kInfo) {
    if (i.name == name) return i.key;
  }
  return std::nullopt;
}

Criterion criterion_from_string(std::string_view name) {
  if (auto c = parse_criterion(name)) return *c;
  throw Error(ErrorKind::InvalidArgument, "unknown criterion '" + std::string(name) + "'");
}

std::string_view to_string(Jurisdiction j) {
  switch (j) {
    case Jurisdiction::AU: return "AU";
    case Jurisdiction::UK: return "UK";
    case Jurisdiction::CA: return "CA";
  }
  return "?";
}

std::optional<Jurisdiction> parse_jurisdiction(std::string_view name) {
  if (name == "AU") return Jurisdiction::AU;
  if (name == "UK") return Jurisdiction::UK;
  if (name == "CA") return Jurisdiction::CA;
  return std::nullopt;
}

Jurisdiction jurisdiction_from_string(std::string_view name) {
  if (auto j = parse_jurisdiction(name)) return *j;
  throw Error(ErrorKind::InvalidArgument, "unknown jurisdiction '" + std::string(name) + "'");
}

}  // namespace msacheck
