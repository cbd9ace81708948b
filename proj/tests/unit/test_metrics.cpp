#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "msacheck/error.hpp"
#include "msacheck/metrics.hpp"

using namespace msacheck;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

// Per-sample form: each sample contributes |gap of its bin| / N.
double ece_oracle(const std::vector<double>& p, const std::vector<bool>& y, std::size_t bins) {
  const std::size_t n = p.size();
  auto bin = [&](double x) { return std::min<std::size_t>(bins - 1, static_cast<std::size_t>(std::floor(x * bins))); };
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sp = 0, sy = 0, cnt = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (bin(p[j]) != bin(p[i])) continue;
      sp += p[j];
      sy += y[j] ? 1 : 0;
      ++cnt;
    }
    total += std::abs(sp / cnt - sy / cnt) / static_cast<double>(n);
  }
  return total;
}

StatementOutcome outcome(std::string id, bool approval, std::optional<Sector> sector = std::nullopt) {
  StatementOutcome o;
  o.statement_id = std::move(id);
  o.metadata.sector = sector;
  for (auto& v : o.relevant) v = {false, false};
  o.relevant[index_of(Criterion::Approval)][1] = approval;
  return o;
}

}  // namespace

TEST_CASE("F1 conventions", "[metrics]") {
  CHECK(f1({1, 0, 1, 0}) == Catch::Approx(2.0 / 3.0));
  CHECK(f1({0, 0, 0, 7}) == 0.0);
  CHECK(f1({5, 0, 0, 0}) == 1.0);
  CHECK(f1({3, 2, 1, 0}) == f1({3, 2, 1, 100}));
  auto c = confusion({true, true, false, false}, {true, false, true, false});
  CHECK(c == ConfusionCounts{1, 1, 1, 1});
  CHECK(c.total() == 4);
  CHECK(kind_of([] { confusion({true}, {}); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("overall F1 is the mean of nine", "[metrics]") {
  std::vector<double> ones(9, 1.0), zeros(9, 0.0);
  CHECK(overall_f1(ones) == 1.0);
  CHECK(overall_f1(zeros) == 0.0);
  const std::vector<double> au = {0.864, 0.769, 0.749, 0.805, 0.738, 0.667, 0.669, 0.592, 0.790};
  CHECK(std::abs(overall_f1(au) - 0.738) <= 0.005);
  std::vector<double> eight(8, 1.0);
  CHECK(kind_of([&] { overall_f1(eight); }) == ErrorKind::ArityError);
}

TEST_CASE("ECE worked examples", "[metrics]") {
  CHECK(expected_calibration_error({1.0, 0.0}, {true, false}) == 0.0);
  CHECK(expected_calibration_error({0.9, 0.1}, {true, false}) == Catch::Approx(0.1).margin(1e-15));
  CHECK(expected_calibration_error({0.5}, {true}) == Catch::Approx(0.5).margin(1e-15));
  CHECK(kind_of([] { expected_calibration_error({0.5}, {true, false}); }) == ErrorKind::LengthMismatch);
  CHECK(kind_of([] { expected_calibration_error({}, {}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { expected_calibration_error({1.2}, {true}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("bin boundaries", "[metrics]") {
  CHECK(calibration_bin(0.0, 10) == 0);
  CHECK(calibration_bin(1.0, 10) == 9);
  CHECK(calibration_bin(0.3, 10) == 3);
  CHECK(calibration_bin(0.7, 10) == 7);
  CHECK(calibration_bin(0.29999999, 10) == 2);
  CHECK(calibration_bin(0.2, 5) == 1);
  CHECK(calibration_bin(0.6, 5) == 3);
  for (std::size_t k = 0; k < 10; ++k) CHECK(calibration_bin(static_cast<double>(k) / 10.0, 10) == k);
}

TEST_CASE("ECE matches the per-sample oracle", "[metrics]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng() % 60;
    std::vector<double> p(n);
    std::vector<bool> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = u(rng);
      y[i] = u(rng) < p[i];
    }
    const double ece = expected_calibration_error(p, y);
    CHECK(std::abs(ece - ece_oracle(p, y, 10)) <= 1e-12);
    CHECK(ece >= 0.0);
    CHECK(ece <= 1.0);
  }
}

TEST_CASE("calibration report bins partition the samples", "[metrics]") {
  std::vector<double> p = {0.05, 0.15, 0.25, 0.45, 0.55, 0.95, 1.0};
  std::vector<bool> y = {false, false, true, false, true, true, true};
  auto r = calibration(p, y);
  CHECK(r.samples == 7);
  std::size_t total = 0;
  for (const auto& b : r.curve) {
    total += b.count;
    CHECK(b.upper - b.lower == Catch::Approx(0.2));
    CHECK(b.mean_predicted >= b.lower);
    CHECK(b.mean_predicted <= b.upper);
  }
  CHECK(total == 7);
  CHECK(r.curve.size() == 4);  // [0.6,0.8) is empty
  CHECK(r.ece == expected_calibration_error(p, y));
}

TEST_CASE("perfectly calibrated data has zero ECE", "[metrics]") {
  std::vector<double> p;
  std::vector<bool> y;
  for (int k = 0; k < 10; ++k) {
    const double prob = (k + 0.5) / 10.0;  // 0.05, 0.15, ...
    for (int i = 0; i < 20; ++i) {
      p.push_back(prob);
      y.push_back(i < static_cast<int>(std::lround(prob * 20)));
    }
  }
  CHECK(expected_calibration_error(p, y) <= 1e-12);
}

TEST_CASE("JSD", "[metrics]") {
  std::vector<double> p = {1.0, 0.0}, q = {0.5, 0.5};
  const double expect = 0.5 * std::log2(1.0 / 0.75) + 0.5 * (0.5 * std::log2(0.5 / 0.75) + 0.5 * std::log2(0.5 / 0.25));
  CHECK(js_divergence(p, q) == Catch::Approx(expect).margin(1e-15));
  CHECK(js_divergence(p, q) == Catch::Approx(0.3112781).margin(1e-7));
  CHECK(js_divergence(q, q) == 0.0);
  CHECK(js_divergence(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == Catch::Approx(1.0).margin(1e-12));

  VocabDistribution a{{{"audit", 0.5}, {"supplier", 0.5}}};
  VocabDistribution b{{{"board", 1.0}}};
  CHECK(js_divergence(a, a) == 0.0);
  CHECK(js_divergence(a, b, 0.0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(js_divergence(a, b) == js_divergence(b, a));
  CHECK(js_divergence(a, b) < 1.0);
  CHECK(kind_of([&] { js_divergence(std::vector<double>{1}, q); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("vocabulary distributions", "[metrics]") {
  std::vector<LabeledSentence> slice = {{"a a b", {}}};
  auto d = vocab_distribution(slice);
  CHECK(d.probability.size() == 2);
  CHECK(d.probability.at("a") == Catch::Approx(2.0 / 3.0));
  CHECK(d.probability.at("b") == Catch::Approx(1.0 / 3.0));
  CHECK(vocab_distribution(slice) == d);

  LabeledSentence pos{"The Board, approved.", {}};
  pos.labels[index_of(Criterion::Approval)] = true;
  slice.push_back(pos);
  auto p = vocab_distribution(slice, Criterion::Approval, Polarity::Positive);
  CHECK(p.probability.size() == 3);
  CHECK(p.probability.contains("board"));
  auto n = vocab_distribution(slice, Criterion::Approval, Polarity::Negative);
  CHECK(n == d);
  CHECK(kind_of([&] { vocab_distribution(slice, Criterion::Signature, Polarity::Positive); }) ==
        ErrorKind::EmptySlice);
  CHECK(vocab_distribution(slice, std::nullopt, Polarity::Positive) == p);
  CHECK(kind_of([] { vocab_distribution({}); }) == ErrorKind::EmptySlice);
}

TEST_CASE("compliance fraction", "[metrics]") {
  std::vector<StatementOutcome> s;
  for (int i = 0; i < 50; ++i) s.push_back(outcome("s" + std::to_string(i), i != 7));
  CHECK(compliance_fraction(s, Criterion::Approval) == Catch::Approx(0.98));
  CHECK(compliance_fraction(s, Criterion::Signature) == 0.0);
  CHECK(compliance_fraction({}, Criterion::Approval) == 0.0);

  const double before = compliance_fraction(s, Criterion::Approval);
  s[7].relevant[0][0] = true;
  CHECK(compliance_fraction(s, Criterion::Approval) > before);
  s[3].relevant[0].push_back(false);
  CHECK(compliance_fraction(s, Criterion::Approval) == 1.0);
}

TEST_CASE("trend reports", "[metrics]") {
  std::vector<StatementOutcome> s;
  int k = 0;
  for (auto sec : kSectors) {
    for (int i = 0; i < 3; ++i) s.push_back(outcome("s" + std::to_string(k++), i < 2, sec));
  }
  s.push_back(outcome("nometa", true));
  auto r = trend_report(s, Facet::Sector);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[0].value == "IndustryInfrastructure");
  for (const auto& row : r.rows) {
    CHECK(row.statements == 3);
    CHECK(row.compliant[0] == 2);
    CHECK(row.fraction[0] == Catch::Approx(2.0 / 3.0));
    CHECK(row.fraction[1] == 0.0);
  }
  CHECK(r.missing_metadata == std::vector<std::string>{"nometa"});

  s.resize(3);
  s[0].metadata.turnover_band = TurnoverBand::Below36M;
  s[1].metadata.turnover_band = TurnoverBand::Above500M;
  s[2].metadata.turnover_band = TurnoverBand::Below36M;
  auto t = trend_report(s, Facet::TurnoverBand);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].value == "<36M");
  CHECK(t.rows[0].statements == 2);

  auto table = to_table(t);
  CHECK(table.starts_with("turnover\tstatements\tApproval\t"));
  CHECK(table.find("<36M\t2\t0.500") != std::string::npos);
  CHECK(parse_facet("year") == Facet::Year);
  CHECK_FALSE(parse_facet("country").has_value());
}
