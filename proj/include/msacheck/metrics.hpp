#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msacheck/corpus.hpp"
#include "msacheck/criteria.hpp"

namespace msacheck {

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  void add(bool predicted, bool gold);
  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts confusion(const std::vector<bool>& predicted, const std::vector<bool>& gold);

// 2tp / (2tp + fp + fn); 0 when nothing was predicted or expected positive.
double f1(const ConfusionCounts& c);

// Unweighted mean of exactly kCriterionCount scores, else ArityError.
double overall_f1(std::span<const double> per_criterion);

struct CalibrationBin {
  double lower = 0.0;
  double upper = 0.0;
  double mean_predicted = 0.0;
  double fraction_positive = 0.0;
  std::size_t count = 0;
};

struct CalibrationReport {
  std::vector<CalibrationBin> curve;  // occupied bins only
  double ece = 0.0;
  std::size_t samples = 0;
};

// Uniform bin holding p: the largest k with k/bins <= p, capped at bins-1.
std::size_t calibration_bin(double p, std::size_t bins);

// Positive-class reliability binning. LengthMismatch for unequal lengths,
// InvalidArgument for an empty set, zero bins or p outside [0,1].
CalibrationReport calibration(const std::vector<double>& probs, const std::vector<bool>& labels,
                              std::size_t curve_bins = 5, std::size_t ece_bins = 10);
double expected_calibration_error(const std::vector<double>& probs, const std::vector<bool>& labels,
                                  std::size_t bins = 10);

struct VocabDistribution {
  std::map<std::string, double> probability;
  bool operator==(const VocabDistribution&) const = default;
};

inline constexpr double kDefaultSmoothing = 1e-9;

// Base-2 Jensen-Shannon divergence. `epsilon` is added to both sides over the
// union support, which is then renormalized; 0 disables smoothing.
double js_divergence(const VocabDistribution& p, const VocabDistribution& q,
                     double epsilon = kDefaultSmoothing);
// Same on aligned probability vectors.
double js_divergence(std::span<const double> p, std::span<const double> q, double epsilon = 0.0);

enum class Polarity { Overall, Positive, Negative };

struct LabeledSentence {
  std::string text;
  std::array<bool, kCriterionCount> labels{};
};

// Positive/Negative select sentences labelled (not) relevant for `criterion`,
// or for any criterion when none is given. EmptySlice when nothing is left.
VocabDistribution vocab_distribution(const std::vector<LabeledSentence>& slice,
                                     std::optional<Criterion> criterion = std::nullopt,
                                     Polarity polarity = Polarity::Overall);

// Per-sentence relevance of one statement, indexed [criterion][sentence].
struct StatementOutcome {
  std::string statement_id;
  StatementMetadata metadata;
  std::array<std::vector<bool>, kCriterionCount> relevant;

  bool addresses(Criterion c) const;
};

// Share of statements with at least one relevant sentence for c; 0 when empty.
double compliance_fraction(const std::vector<StatementOutcome>& statements, Criterion c);

enum class Facet { Sector, TurnoverBand, Year };

std::string_view to_string(Facet f);
std::optional<Facet> parse_facet(std::string_view s);  // "sector", "turnover", "year"

struct TrendRow {
  std::string value;
  std::size_t statements = 0;
  std::array<std::size_t, kCriterionCount> compliant{};
  std::array<double, kCriterionCount> fraction{};
};

struct TrendReport {
  Facet facet = Facet::Sector;
  std::vector<TrendRow> rows;                 // facet order; empty values omitted
  std::vector<std::string> missing_metadata;  // statement ids left out
};

TrendReport trend_report(const std::vector<StatementOutcome>& statements, Facet facet);

// Tab-separated rendering of a trend report.
std::string to_table(const TrendReport& report);

}  // namespace msacheck
