#include "msacheck/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "msacheck/error.hpp"
#include "msacheck/text.hpp"

namespace msacheck {

void ConfusionCounts::add(bool predicted, bool gold) {
  if (predicted && gold) ++tp;
  else if (predicted) ++fp;
  else if (gold) ++fn;
  else ++tn;
}

ConfusionCounts confusion(const std::vector<bool>& predicted, const std::vector<bool>& gold) {
  if (predicted.size() != gold.size()) throw Error(ErrorKind::LengthMismatch, "prediction/gold length mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) c.add(predicted[i], gold[i]);
  return c;
}

double f1(const ConfusionCounts& c) {
  const double denom = 2.0 * static_cast<double>(c.tp) + static_cast<double>(c.fp) + static_cast<double>(c.fn);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / denom;
}

double overall_f1(std::span<const double> scores) {
  if (scores.size() != kCriterionCount) {
    throw Error(ErrorKind::ArityError, "overall F1 needs " + std::to_string(kCriterionCount) +
                                           " scores, got " + std::to_string(scores.size()));
  }
  double s = 0.0;
  for (double x : scores) s += x;
  return s / static_cast<double>(kCriterionCount);
}

std::size_t calibration_bin(double p, std::size_t bins) {
  const double b = static_cast<double>(bins);
  auto k = static_cast<std::size_t>(std::max(0.0, std::floor(p * b)));
  // Guard against p*bins rounding across a bin edge.
  if (k > 0 && p < static_cast<double>(k) / b) --k;
  if (k + 1 < bins && p >= static_cast<double>(k + 1) / b) ++k;
  return std::min(k, bins - 1);
}

namespace {

void check_inputs(const std::vector<double>& probs, const std::vector<bool>& labels, std::size_t bins) {
  if (probs.size() != labels.size()) throw Error(ErrorKind::LengthMismatch, "probs/labels length mismatch");
  if (probs.empty()) throw Error(ErrorKind::InvalidArgument, "calibration needs at least one sample");
  if (bins == 0) throw Error(ErrorKind::InvalidArgument, "bin count must be positive");
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "probability outside [0,1]");
  }
}

std::vector<CalibrationBin> bin_samples(const std::vector<double>& probs, const std::vector<bool>& labels,
                                        std::size_t bins) {
  std::vector<CalibrationBin> out(bins);
  std::vector<double> pos(bins, 0.0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    auto& b = out[calibration_bin(probs[i], bins)];
    b.mean_predicted += probs[i];
    pos[calibration_bin(probs[i], bins)] += labels[i] ? 1.0 : 0.0;
    ++b.count;
  }
  for (std::size_t k = 0; k < bins; ++k) {
    out[k].lower = static_cast<double>(k) / static_cast<double>(bins);
    out[k].upper = static_cast<double>(k + 1) / static_cast<double>(bins);
    if (out[k].count > 0) {
      out[k].mean_predicted /= static_cast<double>(out[k].count);
      out[k].fraction_positive = pos[k] / static_cast<double>(out[k].count);
    }
  }
  return out;
}

}  // namespace

double expected_calibration_error(const std::vector<double>& probs, const std::vector<bool>& labels,
                                  std::size_t bins) {
  check_inputs(probs, labels, bins);
  const double n = static_cast<double>(probs.size());
  double ece = 0.0;
  for (const auto& b : bin_samples(probs, labels, bins)) {
    if (b.count == 0) continue;
    ece += static_cast<double>(b.count) / n * std::abs(b.mean_predicted - b.fraction_positive);
  }
  return ece;
}

CalibrationReport calibration(const std::vector<double>& probs, const std::vector<bool>& labels,
                              std::size_t curve_bins, std::size_t ece_bins) {
  check_inputs(probs, labels, curve_bins);
  CalibrationReport r;
  r.samples = probs.size();
  for (auto& b : bin_samples(probs, labels, curve_bins)) {
    if (b.count > 0) r.curve.push_back(b);
  }
  r.ece = expected_calibration_error(probs, labels, ece_bins);
  return r;
}

double js_divergence(std::span<const double> p, std::span<const double> q, double epsilon) {
  if (p.size() != q.size()) throw Error(ErrorKind::LengthMismatch, "distributions differ in support size");
  if (p.empty()) throw Error(ErrorKind::InvalidArgument, "empty distributions");
  if (epsilon < 0.0) throw Error(ErrorKind::InvalidArgument, "smoothing must be >= 0");
  std::vector<double> a(p.begin(), p.end()), b(q.begin(), q.end());
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] >= 0.0) || !(b[i] >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative probability");
    a[i] += epsilon;
    b[i] += epsilon;
    sa += a[i];
    sb += b[i];
  }
  if (sa <= 0.0 || sb <= 0.0) throw Error(ErrorKind::InvalidArgument, "distribution has no mass");
  double kl_a = 0.0, kl_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i] / sa, y = b[i] / sb;
    const double m = 0.5 * (x + y);
    if (x > 0.0) kl_a += x * std::log2(x / m);
    if (y > 0.0) kl_b += y * std::log2(y / m);
  }
  return std::clamp(0.5 * kl_a + 0.5 * kl_b, 0.0, 1.0);
}

double js_divergence(const VocabDistribution& p, const VocabDistribution& q, double epsilon) {
  std::set<std::string> support;
  for (const auto& [t, _] : p.probability) support.insert(t);
  for (const auto& [t, _] : q.probability) support.insert(t);
  std::vector<double> a, b;
  a.reserve(support.size());
  b.reserve(support.size());
  for (const auto& t : support) {
    auto ip = p.probability.find(t);
    auto iq = q.probability.find(t);
    a.push_back(ip == p.probability.end() ? 0.0 : ip->second);
    b.push_back(iq == q.probability.end() ? 0.0 : iq->second);
  }
  return js_divergence(a, b, epsilon);
}

VocabDistribution vocab_distribution(const std::vector<LabeledSentence>& slice, std::optional<Criterion> c,
                                     Polarity polarity) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& s : slice) {
    bool positive = c ? s.labels[index_of(*c)]
                      : std::any_of(s.labels.begin(), s.labels.end(), [](bool b) { return b; });
    if (polarity == Polarity::Positive && !positive) continue;
    if (polarity == Polarity::Negative && positive) continue;
    for (auto& t : text::normalized_tokens(s.text)) {
      ++counts[t];
      ++total;
    }
  }
  if (total == 0) throw Error(ErrorKind::EmptySlice, "no tokens in the selected slice");
  VocabDistribution d;
  for (const auto& [t, n] : counts) {
    d.probability.emplace(t, static_cast<double>(n) / static_cast<double>(total));
  }
  return d;
}

bool StatementOutcome::addresses(Criterion c) const {
  const auto& row = relevant[index_of(c)];
  return std::any_of(row.begin(), row.end(), [](bool b) { return b; });
}

double compliance_fraction(const std::vector<StatementOutcome>& statements, Criterion c) {
  if (statements.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& s : statements) hit += s.addresses(c) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(statements.size());
}

std::string_view to_string(Facet f) {
  switch (f) {
    case Facet::Sector: return "sector";
    case Facet::TurnoverBand: return "turnover";
    case Facet::Year: return "year";
  }
  return "?";
}

std::optional<Facet> parse_facet(std::string_view s) {
  for (auto f : {Facet::Sector, Facet::TurnoverBand, Facet::Year}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

TrendReport trend_report(const std::vector<StatementOutcome>& statements, Facet facet) {
  // Keyed by facet ordinal so rows come out in enum / calendar order.
  std::map<long, TrendRow> rows;
  TrendReport report;
  report.facet = facet;
  for (const auto& s : statements) {
    long key = 0;
    std::string label;
    const auto& m = s.metadata;
    if (facet == Facet::Sector && m.sector) {
      key = static_cast<long>(*m.sector);
      label = to_string(*m.sector);
    } else if (facet == Facet::TurnoverBand && m.turnover_band) {
      key = static_cast<long>(*m.turnover_band);
      label = to_string(*m.turnover_band);
    } else if (facet == Facet::Year && m.publication_year) {
      key = *m.publication_year;
      label = std::to_string(*m.publication_year);
    } else {
      report.missing_metadata.push_back(s.statement_id);
      continue;
    }
    auto& row = rows[key];
    row.value = label;
    ++row.statements;
    for (auto c : kCriteria) row.compliant[index_of(c)] += s.addresses(c) ? 1 : 0;
  }
  for (auto& [_, row] : rows) {
    for (std::size_t k = 0; k < kCriterionCount; ++k) {
      row.fraction[k] = static_cast<double>(row.compliant[k]) / static_cast<double>(row.statements);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string to_table(const TrendReport& r) {
  std::ostringstream os;
  os << to_string(r.facet) << "\tstatements";
  for (auto c : kCriteria) os << '\t' << to_string(c);
  os << '\n' << std::fixed << std::setprecision(3);
  for (const auto& row : r.rows) {
    os << row.value << '\t' << row.statements;
    for (double f : row.fraction) os << '\t' << f;
    os << '\n';
  }
  if (!r.missing_metadata.empty()) {
    os << "# missing " << to_string(r.facet) << ':';
    for (const auto& id : r.missing_metadata) os << ' ' << id;
    os << '\n';
  }
  return os.str();
}

}  // namespace msacheck
