#include "toricfact/simplex.hpp"

namespace toricfact {

void LinearProgram::add(const QVec& coeffs, Rel rel, const Rat& rhs) {
  if (coeffs.size() != nvars_) throw Error("LinearProgram::add: coefficient size mismatch");
  rows_.push_back(coeffs);
  rels_.push_back(rel);
  rhs_.push_back(rhs);
}

namespace {

// Full-tableau simplex, maximization, all variables nonnegative, Bland's
// rule throughout (first negative reduced cost enters, smallest basic index
// leaves on ratio ties). Reduced costs are recomputed from the tableau each
// iteration; exact arithmetic makes this safe.
struct Tableau {
  Eigen::Index m, n;
  QMat t; // m x (n+1), rhs in the last column, rhs >= 0 maintained
  std::vector<Eigen::Index> basis;

  void pivot(Eigen::Index pr, Eigen::Index pc) {
    Rat p = t(pr, pc);
    t.row(pr) /= p;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == pr || t(i, pc) == 0) continue;
      Rat f = t(i, pc);
      t.row(i) -= f * t.row(pr);
    }
    basis[static_cast<size_t>(pr)] = pc;
  }

  Rat objective(const QVec& c) const {
    Rat v = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::Index bj = basis[static_cast<size_t>(i)];
      if (c(bj) != 0) v += c(bj) * t(i, n);
    }
    return v;
  }

  LPResult::Status run(const QVec& c) {
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < n && enter < 0; ++j) {
        Rat zj = -c(j);
        for (Eigen::Index i = 0; i < m; ++i) {
          Eigen::Index bj = basis[static_cast<size_t>(i)];
          if (c(bj) != 0 && t(i, j) != 0) zj += c(bj) * t(i, j);
        }
        if (zj < 0) enter = j;
      }
      if (enter < 0) return LPResult::OPTIMAL;
      Eigen::Index leave = -1;
      Rat best;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (t(i, enter) <= 0) continue;
        Rat ratio = t(i, n) / t(i, enter);
        if (leave < 0 || ratio < best ||
            (ratio == best && basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return LPResult::UNBOUNDED;
      pivot(leave, enter);
    }
  }
};

} // namespace

LPResult LinearProgram::maximize(const QVec& c) const {
  if (c.size() != nvars_) throw Error("LinearProgram::maximize: objective size mismatch");

  // Column layout: per original variable either one nonneg column or a split
  // pair (+, -); then slack/surplus columns; one artificial per row.
  std::vector<Eigen::Index> pos_col(static_cast<size_t>(nvars_));
  std::vector<Eigen::Index> neg_col(static_cast<size_t>(nvars_), -1);
  Eigen::Index ncols = 0;
  for (Eigen::Index j = 0; j < nvars_; ++j) {
    pos_col[static_cast<size_t>(j)] = ncols++;
    if (!nonneg_[static_cast<size_t>(j)]) neg_col[static_cast<size_t>(j)] = ncols++;
  }
  const Eigen::Index m = static_cast<Eigen::Index>(rows_.size());
  Eigen::Index nslack = 0;
  for (Rel r : rels_)
    if (r != Rel::EQ) ++nslack;
  const Eigen::Index nstruct = ncols + nslack;
  const Eigen::Index ntot = nstruct + m;

  Tableau tab;
  tab.m = m;
  tab.n = ntot;
  tab.t = QMat::Zero(m, ntot + 1);
  tab.basis.assign(static_cast<size_t>(m), -1);

  Eigen::Index slack = ncols;
  for (Eigen::Index i = 0; i < m; ++i) {
    const QVec& a = rows_[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < nvars_; ++j) {
      tab.t(i, pos_col[static_cast<size_t>(j)]) = a(j);
      if (neg_col[static_cast<size_t>(j)] >= 0) tab.t(i, neg_col[static_cast<size_t>(j)]) = -a(j);
    }
    Rel rel = rels_[static_cast<size_t>(i)];
    if (rel == Rel::LE) tab.t(i, slack++) = 1;
    else if (rel == Rel::GE) tab.t(i, slack++) = -1;
    tab.t(i, ntot) = rhs_[static_cast<size_t>(i)];
    if (tab.t(i, ntot) < 0) tab.t.row(i) = -tab.t.row(i);
    tab.t(i, nstruct + i) = 1;
    tab.basis[static_cast<size_t>(i)] = nstruct + i;
  }

  QVec phase1 = QVec::Zero(ntot);
  for (Eigen::Index i = 0; i < m; ++i) phase1(nstruct + i) = -1;
  LPResult res;
  LPResult::Status st = tab.run(phase1);
  if (st != LPResult::OPTIMAL || tab.objective(phase1) != 0) {
    res.status = LPResult::INFEASIBLE;
    return res;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis[static_cast<size_t>(i)] < nstruct) continue;
    Eigen::Index pc = -1;
    for (Eigen::Index j = 0; j < nstruct; ++j)
      if (tab.t(i, j) != 0) {
        pc = j;
        break;
      }
    if (pc >= 0) tab.pivot(i, pc);
  }

  Tableau tab2;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m; ++i)
    if (tab.basis[static_cast<size_t>(i)] < nstruct) keep.push_back(i);
  tab2.m = static_cast<Eigen::Index>(keep.size());
  tab2.n = nstruct;
  tab2.t = QMat::Zero(tab2.m, nstruct + 1);
  for (size_t k = 0; k < keep.size(); ++k) {
    tab2.t.row(static_cast<Eigen::Index>(k)).head(nstruct) = tab.t.row(keep[k]).head(nstruct);
    tab2.t(static_cast<Eigen::Index>(k), nstruct) = tab.t(keep[k], ntot);
    tab2.basis.push_back(tab.basis[static_cast<size_t>(keep[k])]);
  }

  QVec c2 = QVec::Zero(nstruct);
  for (Eigen::Index j = 0; j < nvars_; ++j) {
    c2(pos_col[static_cast<size_t>(j)]) = c(j);
    if (neg_col[static_cast<size_t>(j)] >= 0) c2(neg_col[static_cast<size_t>(j)]) = -c(j);
  }
  st = tab2.run(c2);
  if (st == LPResult::UNBOUNDED) {
    res.status = LPResult::UNBOUNDED;
    return res;
  }
  QVec full = QVec::Zero(nstruct);
  for (Eigen::Index i = 0; i < tab2.m; ++i) full(tab2.basis[static_cast<size_t>(i)]) = tab2.t(i, nstruct);
  res.status = LPResult::OPTIMAL;
  res.x = QVec::Zero(nvars_);
  for (Eigen::Index j = 0; j < nvars_; ++j) {
    Rat v = full(pos_col[static_cast<size_t>(j)]);
    if (neg_col[static_cast<size_t>(j)] >= 0) v -= full(neg_col[static_cast<size_t>(j)]);
    res.x(j) = v;
  }
  res.value = tab2.objective(c2);
  return res;
}

LPResult LinearProgram::minimize(const QVec& c) const {
  LPResult r = maximize(QVec(-c));
  if (r.status == LPResult::OPTIMAL) r.value = -r.value;
  return r;
}

} // namespace toricfact
