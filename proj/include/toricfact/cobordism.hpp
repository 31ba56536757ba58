#pragma once

// Toric birational cobordism over an affine smooth chart: the fan in N + Z
// interpolating between a blowup and its base, with the wall/chamber
// structure of the induced one-parameter action read off an integrally
// twisted coherence certificate.

#include "toricfact/subdiv.hpp"

namespace toricfact {

// The graded pieces of the ambient sheaf description, weights 0, 1 and 2.
struct EITerm {
  ZVec exponent; // monomial coefficient (zero vector = structure sheaf)
  int u0 = 0, u1 = 0, t0 = 0, t1 = 0;
  int weight() const { return u1 + t1; }
};
std::vector<EITerm> build_E_I(const MonomialIdeal& ideal);

// Degree-d graded slice: terms I^{max(d-k,0)} T0^{2d-k} T1^k of weight k.
struct SliceTerm {
  int t0 = 0, t1 = 0;
  int weight = 0;
  std::vector<ZVec> coeff_gens; // generators of the ideal power ({0} = unit)
};
std::vector<SliceTerm> degree_slice(const MonomialIdeal& ideal, int d);

struct CobordismFan {
  Cone base;               // smooth full-dimensional chart in N
  MonomialIdeal ideal;     // the blown-up ideal
  Fan sigma_o;             // P^1-fan over the base, in N + Z
  Fan intermediate;        // possibly singular first stage
  Fan total;               // smooth resolution
  std::vector<DesingStep> desing;
  ZVec cocharacter;        // u = (0, ..., 0, 1)
  std::vector<ZVec> h;     // per maximal cone of total: supporting functional
  Int twist;               // the integral twist multiplier used along -u
  Int d;                   // a_max == 2d
  int veronese = 2;        // 2 after the mandatory doubling, 1 when disabled

  int upper_index() const; // index of the upper maximal cone of sigma_o
  int lower_index() const;
};

// Appendix-style construction: sigma_o, the subdivision cut out by
// min(f_I, max(s, 0)), its deterministic resolution, and the certificate
// with the minimal twist making it globally strictly convex. The Veronese
// doubling is mandatory unless explicitly disabled for debugging.
CobordismFan build_cobordism(const MonomialIdeal& ideal, bool veronese_double = true);

struct WeightInterval {
  Int wmin, wmax;
  bool singleton() const { return wmin == wmax; }
};

struct WeightTable {
  std::vector<Cone> cones; // all cones of the total fan
  std::vector<WeightInterval> intervals;
  Int a_min, a_max;
};

WeightTable weight_intervals(const CobordismFan& b);

struct WallChamberData {
  std::vector<Int> walls; // sorted; chambers are the open intervals between
};

WallChamberData walls(const CobordismFan& b, const WeightTable& wt);

// Cones whose interval contains a.
std::vector<Cone> semistable_subfan(const WeightTable& wt, const Int& a);

struct QuotientResult {
  Fan fan;                     // quotient fan in N
  GenComplex base_complex;     // faces of the base chart
  SubdivState subdivision;     // quotient fan as a subdivision of the base
  CoherenceCertificate cert;   // projectivity certificate over the base
};

// Geometric quotient at a chamber value (a strictly between walls).
QuotientResult git_quotient(const CobordismFan& b, const Int& a);

// Wall quotient: projections of the semistable cones with collapse allowed.
Fan wall_quotient(const CobordismFan& b, const Int& a);

struct ZigzagLeg {
  Fan from;                    // chamber quotient
  Fan to;                      // wall quotient
  SubdivState subdivision;     // from refines to
  CoherenceCertificate cert;
};

struct ZigzagResult {
  std::vector<Int> wall_values;
  std::vector<Fan> wall_quotients;     // W_i per wall
  std::vector<Fan> chamber_quotients;  // W_{i+} = W_{(i+1)-} per chamber
  std::vector<ZigzagLeg> legs;         // for each wall: the incoming and
                                       // outgoing projective morphisms
  std::vector<int> leg_wall;           // wall index of each leg
};

ZigzagResult zigzag(const CobordismFan& b);

// U-locus of the cobordism: faces of the base chart on which the ideal's
// order function vanishes identically.
std::vector<Cone> cobordism_u_faces(const CobordismFan& b);

// Every stage of the zigzag restricts trivially over the U-locus.
bool zigzag_respects_u(const CobordismFan& b, const ZigzagResult& z);

} // namespace toricfact
