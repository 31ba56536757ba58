#pragma once

// Subdivisions with coherence (projectivity) certificates via exact LP, and
// the dictionary between monomial ideals and conewise-minimum PL functions.

#include "toricfact/complex.hpp"
#include "toricfact/simplex.hpp"

namespace toricfact {

// Torus-invariant ideal on one smooth affine chart.
struct MonomialIdeal {
  Cone chart;             // smooth, full-dimensional
  std::vector<ZVec> gens; // exponent vectors, minimal, sorted

  bool is_unit() const { return gens.size() == 1 && is_zero(gens[0]); }
  bool operator==(const MonomialIdeal& o) const {
    return chart == o.chart && ray_list_equal(gens, o.gens);
  }
};

// Minimalizes the generators, validates nonnegativity on the chart.
MonomialIdeal make_ideal(const Cone& chart, std::vector<ZVec> gens);

struct Subdivision {
  SubdivState state;
  TotalComplex total;
};

Subdivision make_subdivision(SubdivState state);

// f linear exactly on the maximal pieces, strictly convex across interior
// walls (minimum convention), compatible across base face maps.
struct CoherenceCertificate {
  std::vector<std::vector<ZVec>> fn; // per base chart, per maximal piece
  struct Wall {
    int piece_a, piece_b;
    Rat margin;
  };
  std::vector<std::vector<Wall>> walls; // interior walls per chart

  PLDatum datum() const; // per-chart functional lists (deduplicated)
};

// Substitution check that cert is a certificate of the subdivision (no LP).
// Returns a human-readable failure description, empty on success.
std::string check_certificate(const SubdivState& s, const CoherenceCertificate& cert);

// Domains of linearity of a compatible PL datum, glued over the base.
Subdivision subdivision_from_pl(const GenComplex& base, const PLDatum& f);

// Exact rational LP on the final object of the subdivision; the certificate
// is pulled back so isomorphic inputs receive identical data. std::nullopt
// means the subdivision is not projective.
std::optional<CoherenceCertificate> certify_coherence(const SubdivState& s);

// Order function of the ideal as a PL datum on the chart's face complex.
struct AffinePL {
  GenComplex complex; // faces of the chart
  int top;            // index of the full-dimensional cone
  PLDatum f;
};
AffinePL pl_from_ideal(const MonomialIdeal& ideal);

// Monomials m with <m, .> >= f on the chart, minimally generated. With
// normalize, the largest linear functional below f is divided out first and
// returned in *factor when given.
MonomialIdeal ideal_from_pl(const Cone& chart, const std::vector<ZVec>& fns, bool normalize,
                            ZVec* factor = nullptr);

MonomialIdeal veronese(const MonomialIdeal& ideal, int k);
PLDatum veronese(const PLDatum& f, int k);

// One stage of a chain of blowups over a fixed base: the cumulative
// subdivision after the stage and the stage's own certificate restricted to
// the cumulative pieces.
struct BlowupStage {
  SubdivState cumulative;
  std::vector<std::vector<ZVec>> stage_fn; // per chart, per max piece of cumulative
};

// Weighted sum Sum N_k * f_k with minimal positive integer weights (by LP)
// making the result a certificate of the last cumulative subdivision.
// Throws when no weights within the bound exist.
CoherenceCertificate compose_blowups(const GenComplex& base, const std::vector<BlowupStage>& chain,
                                     const Int& bound = Int(1000000));

// PL data on `fine` vanishing on the listed old rays and minimally positive
// at each inserted ray: the canonical certificate of one star insertion.
std::vector<ZVec> exceptional_certificate(const Fan& fine, const std::vector<ZVec>& old_rays,
                                          const std::vector<ZVec>& inserted);

// The canonical stage certificate of one simultaneous star round.
std::vector<std::vector<ZVec>> star_stage_certificate(const SubdivState& before,
                                                      const CenterSet& centers,
                                                      const SubdivState& after);

} // namespace toricfact
