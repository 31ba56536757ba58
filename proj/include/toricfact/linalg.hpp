#pragma once

// Exact integer and rational linear algebra: Hermite and Smith normal forms
// with unimodular transformation witnesses, rational elimination, lattice
// saturation. Everything is deterministic.

#include "toricfact/numeric.hpp"

#include <optional>

namespace toricfact {

// U * A = H with U unimodular, H in row echelon form, pivots positive,
// entries above each pivot reduced into [0, pivot). A == Uinv * H.
struct HermiteForm {
  ZMat H;
  ZMat U;
  ZMat Uinv;
};

// U * A * V = S with U, V unimodular and S diagonal, d1 | d2 | ... | dr > 0.
// A == Uinv * S * Vinv.
struct SmithForm {
  ZMat S;
  ZMat U, Uinv;
  ZMat V, Vinv;
};

HermiteForm hermite_form(const ZMat& a);
SmithForm smith_form(const ZMat& a);

std::vector<Int> smith_invariants(const ZMat& a);

Eigen::Index rank(const ZMat& a);
Eigen::Index rank(const QMat& a);

// One solution of A x = b over the rationals, if any.
std::optional<QVec> solve(const QMat& a, const QVec& b);

// Basis of ker(A) as columns; empty-width matrix when A is injective.
QMat kernel(const QMat& a);

QMat inverse(const QMat& a); // throws Error on singular input

// Unimodular inverse of an integer matrix with |det| = 1.
ZMat inverse_unimodular(const ZMat& a);

// Saturated lattice of the column span of A: basis (n x r, columns) and a
// coordinate map (r x n) with coords * basis = I and basis * (coords * v) = v
// for every v in the rational column span.
struct SaturationBasis {
  ZMat basis;
  ZMat coords;
  Eigen::Index rank = 0;
};
SaturationBasis saturate_span(const ZMat& a);

// Does v lie in the integer span of the columns of A?
bool in_lattice_span(const ZMat& a, const ZVec& v);

// Is v in the rational span of the columns of A?
bool in_rational_span(const ZMat& a, const ZVec& v);

ZMat cols_to_matrix(const std::vector<ZVec>& cols, Eigen::Index dim_hint = -1);

} // namespace toricfact
