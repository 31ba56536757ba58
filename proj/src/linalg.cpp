#include "toricfact/linalg.hpp"

namespace toricfact {

namespace {

// Elementary row operations applied in lockstep to the form, the transform U
// and its inverse (so that U stays unimodular and Uinv tracks U^{-1}).
struct RowOps {
  ZMat* m;
  ZMat* u;
  ZMat* uinv;

  void swap(Eigen::Index i, Eigen::Index j) {
    if (i == j) return;
    m->row(i).swap(m->row(j));
    u->row(i).swap(u->row(j));
    uinv->col(i).swap(uinv->col(j));
  }
  void negate(Eigen::Index i) {
    m->row(i) = -m->row(i);
    u->row(i) = -u->row(i);
    uinv->col(i) = -uinv->col(i);
  }
  // row i += c * row j
  void add(Eigen::Index i, const Int& c, Eigen::Index j) {
    if (c == 0) return;
    m->row(i) += c * m->row(j);
    u->row(i) += c * u->row(j);
    uinv->col(j) -= c * uinv->col(i);
  }
};

struct ColOps {
  ZMat* m;
  ZMat* v;
  ZMat* vinv;

  void swap(Eigen::Index i, Eigen::Index j) {
    if (i == j) return;
    m->col(i).swap(m->col(j));
    v->col(i).swap(v->col(j));
    vinv->row(i).swap(vinv->row(j));
  }
  void negate(Eigen::Index i) {
    m->col(i) = -m->col(i);
    v->col(i) = -v->col(i);
    vinv->row(i) = -vinv->row(i);
  }
  // col i += c * col j
  void add(Eigen::Index i, const Int& c, Eigen::Index j) {
    if (c == 0) return;
    m->col(i) += c * m->col(j);
    v->col(i) += c * v->col(j);
    vinv->row(j) -= c * vinv->row(i);
  }
};

Int fdiv_q(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

} // namespace

HermiteForm hermite_form(const ZMat& a) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  HermiteForm hf;
  hf.H = a;
  hf.U = zident(rows);
  hf.Uinv = zident(rows);
  RowOps ops{&hf.H, &hf.U, &hf.Uinv};

  Eigen::Index pr = 0;
  for (Eigen::Index pc = 0; pc < cols && pr < rows; ++pc) {
    // Euclidean elimination in column pc below row pr.
    while (true) {
      Eigen::Index piv = -1;
      for (Eigen::Index i = pr; i < rows; ++i)
        if (hf.H(i, pc) != 0 && (piv < 0 || abs(hf.H(i, pc)) < abs(hf.H(piv, pc)))) piv = i;
      if (piv < 0) break;
      ops.swap(pr, piv);
      if (hf.H(pr, pc) < 0) ops.negate(pr);
      bool clean = true;
      for (Eigen::Index i = pr + 1; i < rows; ++i) {
        if (hf.H(i, pc) == 0) continue;
        Int q = fdiv_q(hf.H(i, pc), hf.H(pr, pc));
        ops.add(i, -q, pr);
        if (hf.H(i, pc) != 0) clean = false;
      }
      if (clean) break;
    }
    if (hf.H(pr, pc) != 0) {
      for (Eigen::Index i = 0; i < pr; ++i) {
        Int q = fdiv_q(hf.H(i, pc), hf.H(pr, pc));
        ops.add(i, -q, pr);
      }
      ++pr;
    }
  }
  return hf;
}

SmithForm smith_form(const ZMat& a) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  SmithForm sf;
  sf.S = a;
  sf.U = zident(rows);
  sf.Uinv = zident(rows);
  sf.V = zident(cols);
  sf.Vinv = zident(cols);
  RowOps rops{&sf.S, &sf.U, &sf.Uinv};
  ColOps cops{&sf.S, &sf.V, &sf.Vinv};

  const Eigen::Index n = std::min(rows, cols);
  for (Eigen::Index t = 0; t < n; ++t) {
    for (;;) {
      Eigen::Index bi = -1, bj = -1;
      for (Eigen::Index i = t; i < rows; ++i)
        for (Eigen::Index j = t; j < cols; ++j)
          if (sf.S(i, j) != 0 &&
              (bi < 0 || abs(sf.S(i, j)) < abs(sf.S(bi, bj)))) {
            bi = i;
            bj = j;
          }
      if (bi < 0) {
        bi = -2;
        break;
      }
      rops.swap(t, bi);
      cops.swap(t, bj);
      if (sf.S(t, t) < 0) rops.negate(t);

      bool dirty = false;
      for (Eigen::Index i = t + 1; i < rows; ++i)
        if (sf.S(i, t) != 0) {
          rops.add(i, -fdiv_q(sf.S(i, t), sf.S(t, t)), t);
          if (sf.S(i, t) != 0) dirty = true;
        }
      for (Eigen::Index j = t + 1; j < cols; ++j)
        if (sf.S(t, j) != 0) {
          cops.add(j, -fdiv_q(sf.S(t, j), sf.S(t, t)), t);
          if (sf.S(t, j) != 0) dirty = true;
        }
      if (dirty) continue;

      // Divisibility: pivot must divide every remaining entry.
      bool fixed = true;
      for (Eigen::Index i = t + 1; i < rows && fixed; ++i)
        for (Eigen::Index j = t + 1; j < cols && fixed; ++j)
          if (sf.S(i, j) % sf.S(t, t) != 0) {
            rops.add(t, 1, i);
            fixed = false;
          }
      if (fixed) break;
    }
    if (sf.S(t, t) == 0) break;
  }
  return sf;
}

std::vector<Int> smith_invariants(const ZMat& a) {
  SmithForm sf = smith_form(a);
  std::vector<Int> d;
  const Eigen::Index n = std::min(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    if (sf.S(i, i) != 0) d.push_back(sf.S(i, i));
  return d;
}

Eigen::Index rank(const ZMat& a) { return rank(to_q(a)); }

Eigen::Index rank(const QMat& a) {
  QMat m = a;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < m.cols() && r < m.rows(); ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = r; i < m.rows(); ++i)
      if (m(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    m.row(piv).swap(m.row(r));
    for (Eigen::Index i = r + 1; i < m.rows(); ++i) {
      if (m(i, c) == 0) continue;
      Rat f = m(i, c) / m(r, c);
      m.row(i) -= f * m.row(r);
    }
    ++r;
  }
  return r;
}

std::optional<QVec> solve(const QMat& a, const QVec& b) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  QMat m(rows, cols + 1);
  m.leftCols(cols) = a;
  m.col(cols) = b;
  std::vector<Eigen::Index> pivot_col;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = r; i < rows; ++i)
      if (m(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    m.row(piv).swap(m.row(r));
    Rat p = m(r, c);
    for (Eigen::Index j = c; j <= cols; ++j) m(r, j) /= p;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      Rat f = m(i, c);
      m.row(i) -= f * m.row(r);
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (Eigen::Index i = r; i < rows; ++i)
    if (m(i, cols) != 0) return std::nullopt;
  QVec x = QVec::Zero(cols);
  for (Eigen::Index k = 0; k < r; ++k) x(pivot_col[k]) = m(k, cols);
  return x;
}

QMat kernel(const QMat& a) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  QMat m = a;
  std::vector<Eigen::Index> pivot_col;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = r; i < rows; ++i)
      if (m(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    m.row(piv).swap(m.row(r));
    Rat p = m(r, c);
    for (Eigen::Index j = c; j < cols; ++j) m(r, j) /= p;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      Rat f = m(i, c);
      m.row(i) -= f * m.row(r);
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivot_col) is_pivot[c] = true;
  std::vector<Eigen::Index> free_cols;
  for (Eigen::Index c = 0; c < cols; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  QMat k = QMat::Zero(cols, static_cast<Eigen::Index>(free_cols.size()));
  for (size_t fi = 0; fi < free_cols.size(); ++fi) {
    Eigen::Index fc = free_cols[fi];
    k(fc, static_cast<Eigen::Index>(fi)) = 1;
    for (Eigen::Index t = 0; t < r; ++t) k(pivot_col[t], static_cast<Eigen::Index>(fi)) = -m(t, fc);
  }
  return k;
}

QMat inverse(const QMat& a) {
  if (a.rows() != a.cols()) throw Error("inverse: matrix not square");
  const Eigen::Index n = a.rows();
  QMat m(n, 2 * n);
  m.leftCols(n) = a;
  m.rightCols(n) = QMat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, n + i) = 1;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = c; i < n; ++i)
      if (m(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) throw Error("inverse: singular matrix");
    m.row(piv).swap(m.row(c));
    Rat p = m(c, c);
    for (Eigen::Index j = c; j < 2 * n; ++j) m(c, j) /= p;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == c || m(i, c) == 0) continue;
      Rat f = m(i, c);
      m.row(i) -= f * m.row(c);
    }
  }
  return m.rightCols(n);
}

ZMat inverse_unimodular(const ZMat& a) {
  QMat qi = inverse(to_q(a));
  ZMat z(qi.rows(), qi.cols());
  for (Eigen::Index i = 0; i < qi.rows(); ++i)
    for (Eigen::Index j = 0; j < qi.cols(); ++j) {
      Rat r = qi(i, j);
      r.canonicalize();
      if (r.get_den() != 1) throw Error("inverse_unimodular: matrix is not unimodular");
      z(i, j) = r.get_num();
    }
  return z;
}

SaturationBasis saturate_span(const ZMat& a) {
  SmithForm sf = smith_form(a);
  Eigen::Index r = 0;
  const Eigen::Index n = std::min(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    if (sf.S(i, i) != 0) ++r;
  SaturationBasis sb;
  sb.rank = r;
  sb.basis = sf.Uinv.leftCols(r);
  sb.coords = sf.U.topRows(r);
  return sb;
}

bool in_lattice_span(const ZMat& a, const ZVec& v) {
  SmithForm sf = smith_form(a);
  ZVec w = sf.U * v;
  const Eigen::Index n = std::min(a.rows(), a.cols());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (sf.S(i, i) != 0) ++r;
  for (Eigen::Index i = 0; i < r; ++i)
    if (w(i) % sf.S(i, i) != 0) return false;
  for (Eigen::Index i = r; i < w.size(); ++i)
    if (w(i) != 0) return false;
  return true;
}

bool in_rational_span(const ZMat& a, const ZVec& v) {
  return solve(to_q(a), to_q(v)).has_value();
}

ZMat cols_to_matrix(const std::vector<ZVec>& cols, Eigen::Index dim_hint) {
  Eigen::Index dim = dim_hint;
  if (dim < 0) dim = cols.empty() ? 0 : cols[0].size();
  ZMat m(dim, static_cast<Eigen::Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != dim) throw Error("cols_to_matrix: inconsistent dimensions");
    m.col(static_cast<Eigen::Index>(j)) = cols[j];
  }
  return m;
}

} // namespace toricfact
