#pragma once

// Concrete fans in a fixed lattice Z^n, kept as canonical lists of maximal
// cones. Used for chart-local subdivisions inside cone complexes and for the
// cobordism fan in N + Z.

#include "toricfact/cone.hpp"

namespace toricfact {

class Fan {
public:
  Fan() = default;
  Fan(Eigen::Index ambient, std::vector<Cone> max_cones, bool validate = false);

  Eigen::Index ambient() const { return ambient_; }
  const std::vector<Cone>& max_cones() const { return max_; }
  bool empty() const { return max_.empty(); }

  // All faces of all maximal cones, deduped, sorted by (dim, rays).
  std::vector<Cone> all_cones() const;
  std::vector<ZVec> rays() const;

  bool is_smooth() const;

  // Star subdivision at a primitive vector: cones containing w are replaced
  // by the joins of w with their faces not containing w.
  Fan star_subdivide(const ZVec& w) const;

  // Every maximal cone of this fan is contained in a maximal cone of other.
  bool refines(const Fan& other) const;

  // Pairwise intersections of maximal cones, keeping full-dimensional pieces.
  Fan common_refinement(const Fan& other) const;

  // The maximal cone whose relative interior contains v, if any.
  const Cone* max_cone_containing(const ZVec& v) const;

  bool operator==(const Fan& o) const;
  std::string key() const;

  // Maximal cones pairwise intersect in common faces.
  void validate_fan() const;

private:
  Eigen::Index ambient_ = 0;
  std::vector<Cone> max_;
};

// Single full-dimensional cone as a fan.
Fan fan_of_cone(const Cone& c);

// Exact volume of the part of the simplicial cone inside {<pos, x> <= 1},
// where pos must be strictly positive on the cone minus the origin; used for
// partition checks of subdivisions.
Rat simplex_volume(const Cone& c, const ZVec& pos);

// Strictly positive functional on a pointed cone: the sum of its facet normals.
ZVec positive_functional(const Cone& c);

// Sum of piece volumes equals the support volume (pieces assumed interior
// disjoint full-dimensional simplicial cones).
bool partition_check(const Cone& support, const std::vector<Cone>& pieces);

struct DesingStep {
  ZVec center;
};

// Deterministic toric desingularization: repeatedly star subdivide at the
// shortest lattice point (ties lexicographic) chosen from a minimal-dimension
// non-smooth cone. Records the star centers. Throws if max_steps is exceeded.
Fan desingularize(const Fan& f, std::vector<DesingStep>* record = nullptr, int max_steps = 4096);

// Conewise-minimum PL data on a fan: one functional list per maximal cone,
// compatible on intersections.
struct FanPL {
  std::vector<std::vector<ZVec>> fn; // parallel to fan.max_cones()
};

// Value at a lattice point of the support.
Rat fan_pl_value(const Fan& f, const FanPL& pl, const ZVec& v);

// Subdivision of the fan into the closures of the domains of linearity.
Fan regions_of_linearity(const Fan& f, const FanPL& pl);

// One functional per maximal cone of "fine" obtained by restricting pl
// (defined on the coarser fan) to the pieces.
std::vector<ZVec> restrict_pl(const Fan& coarse, const FanPL& pl, const Fan& fine);

} // namespace toricfact
