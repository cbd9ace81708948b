#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "msacheck/execution.hpp"

namespace msacheck {

// Membership flags, one per player.
using Coalition = std::vector<bool>;

// A cooperative game. value() must be safe to call concurrently.
class ValueFunction {
 public:
  virtual ~ValueFunction() = default;
  virtual std::size_t players() const = 0;
  virtual double value(const Coalition& s) const = 0;
  // Bound on concurrent value() calls; 0 means unbounded.
  virtual std::size_t max_concurrency() const { return 0; }
};

// Game given by a table indexed by the coalition bitmask (bit i = player i).
class TableGame final : public ValueFunction {
 public:
  TableGame(std::size_t players, std::vector<double> values);
  std::size_t players() const override { return players_; }
  double value(const Coalition& s) const override;

 private:
  std::size_t players_;
  std::vector<double> values_;
};

class FunctionGame final : public ValueFunction {
 public:
  FunctionGame(std::size_t players, std::function<double(const Coalition&)> fn)
      : players_(players), fn_(std::move(fn)) {}
  std::size_t players() const override { return players_; }
  double value(const Coalition& s) const override { return fn_(s); }

 private:
  std::size_t players_;
  std::function<double(const Coalition&)> fn_;
};

enum class AttributionMethod { Exact, Kernel };

struct ShapleyValues {
  std::vector<double> phi;
  double base_value = 0.0;  // v(empty)
  double full_value = 0.0;  // v(all)
  AttributionMethod method = AttributionMethod::Exact;
  std::size_t evaluations = 0;  // value() calls, empty and full coalitions included
};

inline constexpr std::size_t kExactShapleyLimit = 12;

// (M-1) / (C(M,s) s (M-s)); DomainError unless M >= 2 and 1 <= s <= M-1.
double shapley_kernel_weight(std::size_t m, std::size_t s);

// Full 2^M enumeration. TooManyTokens when M > limit.
ShapleyValues exact_shapley(const ValueFunction& v, std::size_t limit = kExactShapleyLimit,
                            Execution execution = Execution::Parallel);

// Weighted least squares over coalitions with the Shapley kernel, the full
// coalition constraint eliminating the last unknown so that the values sum to
// v(all) - v(empty). The budget counts every value() call. When 2^M fits in the
// budget all coalitions are used; otherwise small strata are enumerated while
// the budget covers them and the rest are sampled in complement pairs.
ShapleyValues kernel_shap(const ValueFunction& v, std::size_t budget, std::uint64_t seed,
                          Execution execution = Execution::Parallel);

}  // namespace msacheck
