#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace msacheck {

enum class Jurisdiction { AU, UK, CA };

inline constexpr std::array<Jurisdiction, 3> kJurisdictions = {Jurisdiction::AU, Jurisdiction::UK,
                                                               Jurisdiction::CA};

// The nine common reporting criteria, in fixed reporting order.
enum class Criterion {
  Approval,
  Signature,
  C2_Structure,
  C2_Operations,
  C2_SupplyChains,
  C3_RiskDescription,
  C4_RiskMitigation,
  C4_Remediation,
  C5_Effectiveness,
};

inline constexpr std::size_t kCriterionCount = 9;

inline constexpr std::array<Criterion, kCriterionCount> kCriteria = {
    Criterion::Approval,          Criterion::Signature,          Criterion::C2_Structure,
    Criterion::C2_Operations,     Criterion::C2_SupplyChains,    Criterion::C3_RiskDescription,
    Criterion::C4_RiskMitigation, Criterion::C4_Remediation,     Criterion::C5_Effectiveness,
};

constexpr std::size_t index_of(Criterion c) { return static_cast<std::size_t>(c); }

struct CriterionInfo {
  Criterion key;
  std::string_view name;          // stable key used in files and APIs
  std::string_view display_name;  // report label
  std::string_view description;   // annotation question
};

const CriterionInfo& info(Criterion c);

std::string_view to_string(Criterion c);
std::optional<Criterion> parse_criterion(std::string_view name);
Criterion criterion_from_string(std::string_view name);  // throws InvalidArgument

std::string_view to_string(Jurisdiction j);
std::optional<Jurisdiction> parse_jurisdiction(std::string_view name);
Jurisdiction jurisdiction_from_string(std::string_view name);  // throws InvalidArgument

}  // namespace msacheck
