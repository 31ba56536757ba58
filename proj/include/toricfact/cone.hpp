#pragma once

// Single-cone polyhedral primitives: strongly convex rational cones with
// integral structure, double description, faces, membership, barycenters,
// smoothness. Supports general pointed cones; the factorization engine only
// ever constructs simplicial ones.

#include "toricfact/linalg.hpp"

namespace toricfact {

struct Cone {
  Eigen::Index rank = 0;  // ambient rank
  std::vector<ZVec> rays; // primitive extreme rays, lex-sorted

  Eigen::Index dim() const;
  bool is_simplicial() const { return static_cast<Eigen::Index>(rays.size()) == dim(); }
  ZMat ray_matrix() const { return cols_to_matrix(rays, rank); }
  std::string key() const;
  bool operator==(const Cone& o) const { return rank == o.rank && ray_list_equal(rays, o.rays); }
};

// Builds a cone from generators: primitivizes, removes non-extreme
// generators, sorts. Throws if the generators span a line (not strongly
// convex) or dimensions mismatch.
Cone make_cone(Eigen::Index rank, const std::vector<ZVec>& generators);

// Result of a double description run: cone = span(lineality) + cone(rays).
struct DDResult {
  std::vector<ZVec> rays;
  std::vector<ZVec> lineality;
};

// Extreme rays of { x in span(init_lineality) : <a, x> >= 0 for a in halfspaces }.
DDResult dual_description(std::vector<ZVec> init_lineality, const std::vector<ZVec>& halfspaces);

// Primitive facet functionals of the cone within its span: for v in span,
// v lies in the cone iff all pairings are >= 0, in the relative interior iff
// all are > 0. Empty for cones of dimension <= 0.
std::vector<ZVec> facet_normals(const Cone& c);

enum class Strictness { Boundary, Interior };

bool contains(const Cone& c, const ZVec& v, Strictness s);

// All faces including the zero cone and the cone itself, sorted by dimension
// then lexicographically on sorted ray lists.
std::vector<Cone> faces(const Cone& c);

// Rays (as indices into c.rays) of the minimal face containing v; v must lie in c.
std::vector<int> minimal_face_ray_indices(const Cone& c, const ZVec& v);

// Is cone(sub) a face of c? sub given by primitive rays of c.
bool is_face_of(const Cone& c, const std::vector<ZVec>& sub);

ZVec barycenter(const Cone& c); // throws on the zero cone

bool is_smooth(const Cone& c);

// Generators of the intersection of two cones in the same ambient lattice.
Cone intersect_cones(const Cone& a, const Cone& b);

} // namespace toricfact
