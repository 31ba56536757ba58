#pragma once

// Independent checkers and brute-force oracles. Everything here re-derives
// its verdicts from lattice primitives by substitution and enumeration; no
// code is shared with the constructive search paths beyond the lattice layer.

#include "toricfact/cobordism.hpp"
#include "toricfact/engine.hpp"

namespace toricfact {

// Lattice functionals m with <m, .> >= h on the support of the cobordism fan
// and equality on the given cone; returns their pairings with the
// cocharacter. Bounded enumeration over the dual polyhedron; a nonpositive
// bound selects one wide enough for all extreme sections.
std::optional<std::vector<Int>> oracle_weights(const CobordismFan& b, const Cone& cone,
                                               int scale = 1, long coord_bound = 0);

// Exhaustive breadth-first search over forward star-subdivision sequences of
// a two-dimensional chart; returns the shortest insertion order reaching the
// target, or std::nullopt when the bound is exceeded.
std::optional<std::vector<ZVec>> oracle_factor_2d(const Cone& chart, const Fan& target,
                                                  int max_len = 9);

struct ConditionReport {
  std::string name;
  bool pass = false;
  std::string witness; // first failure, empty on pass
};

struct VerificationReport {
  std::vector<ConditionReport> conditions;
  bool pass = false;
  std::string first_failure() const {
    for (const auto& c : conditions)
      if (!c.pass) return c.name + ": " + c.witness;
    return "";
  }
};

// Re-derives the five certificate conditions from scratch: recomposition,
// isomorphism over the U-locus, smooth centers disjoint from U, boundary
// compatibility, and the per-stage ideals (by substitution, never by
// re-solving the search problems).
VerificationReport check_weak_factorization(const FactorizationCertificate& c);

// Step-by-step equality of the pullback of c_target along phi with c_source.
bool check_functoriality(const GenComplex& src, const GenComplex& dst, const ComplexMorphism& phi,
                         const FactorizationCertificate& c_target,
                         const FactorizationCertificate& c_source, std::string* witness = nullptr);

} // namespace toricfact
