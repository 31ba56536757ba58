#pragma once

// The weak-factorization pipeline: barycentric reduction, the
// two-dimensional factorization core, the pi-desingularization extension
// point, and functorial assembly through final objects.

#include "toricfact/subdiv.hpp"

#include <functional>

namespace toricfact {

struct MarkedComplex {
  GenComplex cx;
  std::vector<int> u_cones;       // indices of the U-subcomplex cones
  std::vector<int> boundary_rays; // indices of ray cones marked as boundary
};

// U-subcomplex of a datum: cones where f vanishes identically and which do
// not meet the boundary.
std::vector<int> u_subcomplex(const GenComplex& cx, const PLDatum& f,
                              const std::vector<int>& boundary_rays);

struct FactorizationStep {
  bool forward = true;       // forward: result = star(previous, centers);
                             // inverse: previous = star(result, centers)
  CenterSet centers;         // chart-concrete center faces with star points
  SubdivState result;        // subdivision of X2 after the step
  CoherenceCertificate j;    // certificate of result over X2
};

struct FactorizationCertificate {
  MarkedComplex base;               // X2
  PLDatum input;                    // order function of the blown-up ideal
  SubdivState source;               // X1 as a subdivision of X2
  CoherenceCertificate source_cert; // certificate of the source subdivision
  std::vector<FactorizationStep> steps; // listed from the X2 end to the X1 end
  bool strong = false;              // no inverse steps (2D strengthening)
};

// Forward star rounds (single center classes) from one subdivision to a
// refinement of it; throws when the greedy search stalls.
struct StarPathStep {
  CenterSet centers;
  SubdivState result;
};
std::vector<StarPathStep> smooth_star_path(const SubdivState& from, const SubdivState& to,
                                           int max_steps = 512);

// Strong factorization of a coherent smooth subdivision in dimension <= 2.
FactorizationCertificate factor_2d(const MarkedComplex& base, const PLDatum& f);

// Simultaneous barycentric rounds avoiding the U-subcomplex, applied to a
// subdivision state (the engine-side Delta -> B(Delta)).
std::vector<StarPathStep> barycentric_rounds(const SubdivState& state,
                                             const std::vector<int>& u_cones);

struct BarycentricReduction {
  std::vector<StarPathStep> front;  // source -> B(B(source)) -> common refinement
  SubdivState front_end;            // the refinement Delta_1'
  SubdivState delta_prime;          // B(B(Delta)) as a subdivision of X2
  std::vector<StarPathStep> back;   // trivial -> B(B(Delta))
  FanEmbedding delta_prime_fan;     // Delta' realized as an honest fan
  CoherenceCertificate residual_cert; // relative coherence of front_end over delta_prime
};

BarycentricReduction barycentric_reduction(const MarkedComplex& base, const SubdivState& source,
                                           int max_steps = 512);

// Relative coherence: a PL function linear on the fine pieces, continuous,
// and strictly convex within each coarse piece.
std::optional<CoherenceCertificate> certify_relative(const SubdivState& coarse,
                                                     const SubdivState& fine);

// A plugin consumes the coarse and fine states (residual fine -> coarse) and
// returns a zigzag of star-path steps whose recomposition is the residual.
using PiDesingPlugin =
    std::function<std::vector<FactorizationStep>(const SubdivState&, const SubdivState&)>;

// Dimension <= 2: delegates to the star-path core. Identity residual: empty.
// Dimension >= 3: requires a plugin whose output is verified before use.
std::vector<FactorizationStep> pi_desingularize(const SubdivState& coarse, const SubdivState& fine,
                                                const PiDesingPlugin& plugin = nullptr);

struct EngineOptions {
  int max_steps = 512;
  PiDesingPlugin plugin = nullptr;
};

FactorizationCertificate weak_factorization(const MarkedComplex& base, const PLDatum& f,
                                            const EngineOptions& opts = {});

FactorizationCertificate weak_factorization(const MarkedComplex& base, const MonomialIdeal& ideal,
                                            const EngineOptions& opts = {});

// Computes the final object of (base, f), factors there, and pulls back, so
// the output is literally functorial along surjective face maps.
FactorizationCertificate functorial_factorization(const MarkedComplex& base, const PLDatum& f,
                                                  const EngineOptions& opts = {});

// Pullback of a whole certificate along a face map phi: src -> dst.
FactorizationCertificate pullback_factorization(const MarkedComplex& src_base,
                                                const GenComplex& dst,
                                                const ComplexMorphism& phi,
                                                const FactorizationCertificate& cert);

// Certificate equality, chart by chart (used by the functoriality checks).
bool certificates_equal(const FactorizationCertificate& a, const FactorizationCertificate& b,
                        std::string* why = nullptr);

} // namespace toricfact
