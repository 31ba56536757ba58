#pragma once

// Exact rational linear programming: dense two-phase simplex with Bland's
// rule. Deterministic by construction; used wherever a coherence certificate
// or multiplier choice is searched for.

#include "toricfact/numeric.hpp"

namespace toricfact {

enum class Rel { LE, EQ, GE };

struct LPResult {
  enum Status { OPTIMAL, INFEASIBLE, UNBOUNDED } status = INFEASIBLE;
  QVec x;    // values of the original variables
  Rat value; // objective at x
  bool ok() const { return status == OPTIMAL; }
};

class LinearProgram {
public:
  explicit LinearProgram(Eigen::Index nvars) : nvars_(nvars), nonneg_(nvars, false) {}

  Eigen::Index num_vars() const { return nvars_; }
  void set_nonneg(Eigen::Index j) { nonneg_.at(static_cast<size_t>(j)) = true; }

  void add(const QVec& coeffs, Rel rel, const Rat& rhs);

  LPResult maximize(const QVec& c) const;
  LPResult minimize(const QVec& c) const;

private:
  Eigen::Index nvars_;
  std::vector<bool> nonneg_;
  std::vector<QVec> rows_;
  std::vector<Rel> rels_;
  std::vector<Rat> rhs_;
};

} // namespace toricfact
