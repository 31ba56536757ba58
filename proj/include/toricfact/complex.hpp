#pragma once

// Generalized cone complexes: finite diagrams of cones and face maps, closed
// under composition. Cones are stored full-dimensional in their own lattice;
// a face map is an injective lattice-saturated matrix identifying the source
// with a face of the target. Subdivisions are kept chart-concretely as one
// local fan per cone of the base complex.

#include "toricfact/fan.hpp"

#include <map>
#include <optional>

namespace toricfact {

struct FaceMapRec {
  int src = -1;
  int dst = -1;
  ZMat mat; // dim(dst) x dim(src)
  std::string key() const;
};

// A map of complexes: per source cone a target cone and a matrix.
struct ComplexMorphism {
  std::vector<int> cone_to;
  std::vector<ZMat> mats;
};

class GenComplex {
public:
  GenComplex() = default;

  // Validates cones and maps, adds identities, closes under composition.
  // With complete_faces, missing faces are added as new cones with inclusion
  // maps; otherwise face-completeness is checked and violations throw.
  static GenComplex build(std::vector<Cone> cones, std::vector<FaceMapRec> gen_maps,
                          bool complete_faces = false, size_t closure_cap = 100000);

  const std::vector<Cone>& cones() const { return cones_; }
  const std::vector<FaceMapRec>& maps() const { return maps_; }
  std::vector<int> maps_between(int src, int dst) const;

  Eigen::Index dim() const;
  bool is_smooth() const;
  size_t size() const { return cones_.size(); }
  std::string key() const;
  bool operator==(const GenComplex& o) const { return key() == o.key(); }

private:
  std::vector<Cone> cones_;
  std::vector<FaceMapRec> maps_; // closed, with identities, canonically sorted
};

// At most one face map between each ordered pair of cones.
bool is_cone_complex(const GenComplex& s);

struct ReduceResult {
  GenComplex reduced;
  std::vector<int> class_of; // original cone -> reduced index
  std::vector<ZMat> to_rep;  // original cone -> rep coordinates
  ComplexMorphism witness;   // reduced -> original (an isomorphism)
};

// One representative per diagram-isomorphism class of cones, with all
// induced face maps between representatives.
ReduceResult reduce(const GenComplex& s);

// Is phi a valid map of diagrams (optionally: a face map)?
bool morphism_valid(const GenComplex& src, const GenComplex& dst, const ComplexMorphism& phi,
                    bool require_face_map, std::string* why = nullptr);

bool morphism_surjective(const GenComplex& src, const GenComplex& dst, const ComplexMorphism& phi);

// Face map inducing a bijection on colimit points, decided class-by-class.
bool is_isomorphism(const GenComplex& src, const GenComplex& dst, const ComplexMorphism& phi);

// ---------------------------------------------------------------------------
// PL data

struct PLDatum {
  std::vector<std::vector<ZVec>> fn; // per cone: min over this functional list
};

std::vector<ZVec> essential_functionals(const Cone& c, const std::vector<ZVec>& fns);
bool pl_equal_on_cone(const Cone& c, const std::vector<ZVec>& a, const std::vector<ZVec>& b);
bool pl_compatible(const GenComplex& s, const PLDatum& f, std::string* why = nullptr);
PLDatum pullback_pl(const GenComplex& src, const GenComplex& dst, const ComplexMorphism& phi,
                    const PLDatum& f);

// ---------------------------------------------------------------------------
// Chart-concrete subdivisions

class SubdivState {
public:
  SubdivState() = default;
  explicit SubdivState(GenComplex base); // trivial subdivision

  const GenComplex& base() const { return base_; }
  const std::vector<Fan>& charts() const { return charts_; }
  Fan& chart(size_t i) { return charts_[i]; }
  const Fan& chart(size_t i) const { return charts_[i]; }

  bool is_trivial() const;
  bool trivial_on_chart(size_t i) const;

  // Cross-chart consistency: restriction along every base face map matches.
  void validate(bool check_partition = true) const;

  bool refines(const SubdivState& other) const;
  SubdivState common_refinement(const SubdivState& other) const;

  bool operator==(const SubdivState& o) const;
  std::string key() const;

private:
  GenComplex base_;
  std::vector<Fan> charts_;
};

// Restriction of a chart fan to a face of the chart cone, expressed in the
// face's own saturated coordinates via the map matrix.
Fan restrict_chart(const Fan& f, const Cone& chart_cone, const ZMat& face_map_mat,
                   const Cone& face_cone);

// One star center: a cone of the current subdivision together with the ray
// to insert (the barycenter for the smooth star subdivisions of the
// factorization; arbitrary relative-interior points appear only in
// resolution targets).
struct CenterRef {
  Cone face;  // in chart coordinates
  ZVec point; // primitive, in the relative interior of face
  std::string key() const { return face.key() + "@" + to_string(point); }
};
CenterRef barycentric_center(const Cone& face);

// Center sets for simultaneous star subdivision, one list per chart, closed
// under transport along base maps.
struct CenterSet {
  std::vector<std::vector<CenterRef>> per_chart;
  bool empty() const;
  bool all_barycentric() const;
};

// Closes a seed under transport along all base face maps (both directions).
CenterSet activate_centers(const SubdivState& s, const CenterSet& seed);

// Validates the preconditions (centers are cones of the current state with
// interior points, pairwise non-faces) and stars every chart at the points.
void star_round(SubdivState& s, const CenterSet& centers);

// Deterministic desingularization of a subdivision state: picks the
// canonically smallest non-smooth piece, stars the activation orbit of its
// shortest fundamental lattice point, and repeats.
void desingularize_state(SubdivState& s, int max_steps = 4096);

// ---------------------------------------------------------------------------
// Materialization of the total complex of a subdivision

struct TotalComplex {
  GenComplex total;
  // per chart: per maximal piece (parallel to chart.max_cones()): total index
  std::vector<std::vector<int>> piece_class;
  // carrier of each total cone: base cone index + embedding of the total
  // cone's rep into that base cone's coordinates
  std::vector<int> carrier_base;
  std::vector<ZMat> carrier_embed;
};

TotalComplex materialize(const SubdivState& s);

// ---------------------------------------------------------------------------
// Star subdivision and barycentric subdivision

struct StarStep {
  CenterSet centers; // chart-concrete record of one simultaneous round
};

// Simultaneous smooth star subdivision at the barycenters of the given cone
// classes (indices into s.cones(), closed under isomorphism by activation).
// Returns the new complex together with the subdivision of the old one.
struct StarResult {
  GenComplex complex;
  SubdivState subdivision; // of the input complex
  StarStep step;
};
StarResult star_subdivide(const GenComplex& s, const std::vector<int>& center_cones,
                          bool require_smooth = true);

struct BarycentricResult {
  GenComplex complex;              // B(Delta), reduced
  SubdivState subdivision;         // of the input complex
  std::vector<StarStep> witness;   // simultaneous rounds, decreasing dimension
  // flags: per cone of B(Delta), the chain of input cone classes whose
  // barycenters span it (sorted by increasing dimension)
  std::vector<std::vector<int>> flags;
  // per cone of B(Delta): the input class of each of its rays, parallel to
  // the sorted ray list of the cone
  std::vector<std::vector<int>> ray_class;
  std::vector<int> input_class_of; // input cone -> class id used in flags
};

BarycentricResult barycentric_subdivision(const GenComplex& s);

struct FanEmbedding {
  Fan fan;                       // in Z^{number of input classes}
  GenComplex fan_complex;        // the fan as a complex
  ComplexMorphism iso;           // B(Delta) -> fan_complex
};

// Embedding of a barycentric subdivision into one lattice with a
// unit basis vector per cone class. Requires a smooth cone complex input.
FanEmbedding embed_barycentric_as_fan(const BarycentricResult& b);

// ---------------------------------------------------------------------------
// Final objects

struct FinalObjectResult {
  GenComplex complex; // reduced, canonically framed and ordered
  PLDatum f;          // transported datum
  ComplexMorphism g;  // input -> final
};

// Enlarges the face-map set to all f-compatible face maps and returns the
// reduced presentation; the mechanism behind functorial certificates.
// Optional integer labels per cone (for instance boundary markings) restrict
// the compatible isomorphisms to label-preserving ones.
FinalObjectResult final_object(const GenComplex& s, const PLDatum& f,
                               const std::vector<int>& labels = {});

// All lattice isomorphisms between two cones (as ray bijections that extend
// to unimodular maps).
std::vector<ZMat> cone_isomorphisms(const Cone& a, const Cone& b);

// Pullback of a subdivision along a face map phi: src -> dst.
SubdivState pullback_subdivision(const GenComplex& src, const GenComplex& dst,
                                 const ComplexMorphism& phi, const SubdivState& sub);

// Convert a concrete fan into a complex (faces saturated, inclusion maps),
// remembering each complex cone's embedding into the fan's lattice.
struct FanAsComplex {
  GenComplex complex;
  std::vector<ZMat> embed;     // per cone: ambient x dim
  std::vector<int> max_index;  // complex index of each maximal fan cone
};
FanAsComplex fan_to_complex(const Fan& f);

} // namespace toricfact
