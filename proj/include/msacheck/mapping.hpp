#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "msacheck/criteria.hpp"

namespace msacheck {

enum class AlignmentStatus { Perfect, Partial, None };

std::string_view to_string(AlignmentStatus s);

struct Alignment {
  Criterion criterion = Criterion::Approval;
  Jurisdiction source = Jurisdiction::AU;
  Jurisdiction target = Jurisdiction::AU;
  AlignmentStatus status = AlignmentStatus::Perfect;
  std::string source_citation;
  std::string target_citation;
};

// A criterion from one jurisdiction that has no counterpart in the common set.
struct ExcludedCriterion {
  Jurisdiction jurisdiction = Jurisdiction::AU;
  std::string key;
  std::string description;
  AlignmentStatus status = AlignmentStatus::None;
};

class JurisdictionMap {
 public:
  // Total over the nine criteria and all ordered jurisdiction pairs.
  Alignment alignment_status(Criterion c, Jurisdiction source, Jurisdiction target) const;

  const std::vector<ExcludedCriterion>& excluded() const { return excluded_; }
  int version() const { return version_; }

 private:
  friend JurisdictionMap parse_mapping(std::string_view document);

  using Pair = std::pair<Jurisdiction, Jurisdiction>;  // canonical: source < target
  std::map<std::pair<Criterion, Pair>, Alignment> cells_;
  std::vector<ExcludedCriterion> excluded_;
  int version_ = 0;
};

// Parses the tab-separated mapping document:
//   #msacheck-mapping v<N>
//   align<TAB>criterion<TAB>src<TAB>tgt<TAB>status<TAB>src citation<TAB>tgt citation
//   excluded<TAB>jurisdiction<TAB>key<TAB>description
// Throws IncompleteMapping listing missing and duplicate cells, MalformedInput
// for unparseable lines.
JurisdictionMap parse_mapping(std::string_view document);
JurisdictionMap load_mapping(const std::filesystem::path& path);
JurisdictionMap load_default_mapping();

// The study scope is the nine common criteria regardless of jurisdiction.
std::vector<Criterion> criteria_for(Jurisdiction j);

}  // namespace msacheck
