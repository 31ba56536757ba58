#include "toricfact/complex.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace toricfact {

std::string FaceMapRec::key() const {
  std::ostringstream os;
  os << src << ">" << dst << ":" << encode(mat);
  return os.str();
}

namespace {

struct AbstractPiece {
  Cone cone;  // full-dim in its own lattice
  ZMat embed; // ambient x dim
  ZMat coords; // dim x ambient, coords * embed = I
};

AbstractPiece abstract_of(const Cone& concrete) {
  AbstractPiece ap;
  if (concrete.rays.empty()) {
    ap.cone.rank = 0;
    ap.embed = ZMat(concrete.rank, 0);
    ap.coords = ZMat(0, concrete.rank);
    return ap;
  }
  Eigen::Index d = concrete.dim();
  if (d == concrete.rank) {
    ap.cone = concrete;
    ap.embed = zident(d);
    ap.coords = zident(d);
    return ap;
  }
  SaturationBasis sb = saturate_span(concrete.ray_matrix());
  std::vector<ZVec> rays;
  for (const auto& r : concrete.rays) rays.push_back(sb.coords * r);
  ap.cone = make_cone(d, rays);
  ap.embed = sb.basis;
  ap.coords = sb.coords;
  return ap;
}

ZMat solve_exact_matrix(const ZMat& a, const ZMat& rhs) {
  // unique integral solution X of a * X = rhs (a injective, saturated image)
  QMat aq = to_q(a);
  ZMat x(a.cols(), rhs.cols());
  for (Eigen::Index j = 0; j < rhs.cols(); ++j) {
    auto col = solve(aq, to_q(ZVec(rhs.col(j))));
    if (!col) throw Error("solve_exact_matrix: inconsistent system");
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
      Rat r = (*col)(i);
      r.canonicalize();
      if (r.get_den() != 1) throw Error("solve_exact_matrix: non-integral solution");
      x(i, j) = r.get_num();
    }
  }
  return x;
}

bool map_is_valid(const std::vector<Cone>& cones, const FaceMapRec& m, std::string* why) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  if (m.src < 0 || m.dst < 0 || m.src >= static_cast<int>(cones.size()) ||
      m.dst >= static_cast<int>(cones.size()))
    return fail("face map indices out of range");
  const Cone& s = cones[static_cast<size_t>(m.src)];
  const Cone& d = cones[static_cast<size_t>(m.dst)];
  if (m.mat.rows() != d.rank || m.mat.cols() != s.rank) return fail("face map matrix shape mismatch");
  if (rank(m.mat) != s.rank) return fail("face map not injective on the source lattice");
  for (const auto& inv : smith_invariants(m.mat))
    if (inv != 1) return fail("face map image is not lattice saturated");
  std::vector<ZVec> image;
  for (const auto& r : s.rays) image.push_back(primitive(ZVec(m.mat * r)));
  if (!is_face_of(d, image)) return fail("face map image is not a face of the target");
  return true;
}

} // namespace

GenComplex GenComplex::build(std::vector<Cone> cones, std::vector<FaceMapRec> gen_maps,
                             bool complete_faces, size_t closure_cap) {
  for (auto& c : cones) {
    Cone canon = make_cone(c.rank, c.rays);
    if (!(canon == c)) c = canon;
    if (c.dim() != c.rank)
      throw Error("complex cones must be full-dimensional in their own lattice");
  }

  std::string why;
  for (const auto& m : gen_maps)
    if (!map_is_valid(cones, m, &why)) throw Error("invalid face map: " + why);

  if (complete_faces) {
    const size_t ncones0 = cones.size();
    for (size_t i = 0; i < ncones0; ++i) {
      const Cone parent = cones[i];
      std::vector<int> added; // indices of face cones added for this parent
      std::vector<Cone> added_face; // the concrete faces
      std::vector<ZMat> added_embed;
      for (const auto& f : faces(parent)) {
        bool covered = false;
        for (const auto& m : gen_maps) {
          if (m.dst != static_cast<int>(i)) continue;
          std::vector<ZVec> image;
          for (const auto& r : cones[static_cast<size_t>(m.src)].rays)
            image.push_back(primitive(ZVec(m.mat * r)));
          Cone img = make_cone(parent.rank, image);
          if (img == f) {
            covered = true;
            break;
          }
        }
        if (f == parent) covered = true;
        if (covered) continue;
        AbstractPiece ap = abstract_of(f);
        cones.push_back(ap.cone);
        int idx = static_cast<int>(cones.size()) - 1;
        gen_maps.push_back({idx, static_cast<int>(i), ap.embed});
        added.push_back(idx);
        added_face.push_back(f);
        added_embed.push_back(ap.embed);
      }
      for (size_t a = 0; a < added.size(); ++a)
        for (size_t b = 0; b < added.size(); ++b) {
          if (a == b) continue;
          if (added_face[a].rays.size() >= added_face[b].rays.size()) continue;
          if (!is_face_of(added_face[b], added_face[a].rays)) continue;
          // inclusion added_face[a] into added_face[b], in abstract coords
          ZMat ab = solve_exact_matrix(added_embed[b], added_embed[a]);
          gen_maps.push_back({added[a], added[b], ab});
        }
    }
  }

  GenComplex g;
  g.cones_ = cones;
  std::map<std::string, FaceMapRec> closed;
  std::vector<FaceMapRec> work;
  auto push = [&](const FaceMapRec& m) {
    std::string k = m.key();
    if (closed.count(k)) return;
    closed[k] = m;
    work.push_back(m);
  };
  for (size_t i = 0; i < cones.size(); ++i)
    push({static_cast<int>(i), static_cast<int>(i), zident(cones[i].rank)});
  for (const auto& m : gen_maps) push(m);
  while (!work.empty()) {
    FaceMapRec m = work.back();
    work.pop_back();
    // compose with everything on both sides
    std::vector<FaceMapRec> snapshot;
    snapshot.reserve(closed.size());
    for (const auto& [k, v] : closed) snapshot.push_back(v);
    for (const auto& o : snapshot) {
      if (o.src == m.dst) push({m.src, o.dst, ZMat(o.mat * m.mat)});
      if (m.src == o.dst) push({o.src, m.dst, ZMat(m.mat * o.mat)});
      if (closed.size() > closure_cap)
        throw Error("face map closure exceeded the configured bound");
    }
  }
  g.maps_.clear();
  for (const auto& [k, v] : closed) g.maps_.push_back(v);
  std::sort(g.maps_.begin(), g.maps_.end(), [](const FaceMapRec& a, const FaceMapRec& b) {
    if (a.src != b.src) return a.src < b.src;
    if (a.dst != b.dst) return a.dst < b.dst;
    return encode(a.mat) < encode(b.mat);
  });

  // face-completeness
  for (size_t i = 0; i < g.cones_.size(); ++i) {
    for (const auto& f : faces(g.cones_[i])) {
      bool covered = false;
      for (const auto& m : g.maps_) {
        if (m.dst != static_cast<int>(i)) continue;
        std::vector<ZVec> image;
        for (const auto& r : g.cones_[static_cast<size_t>(m.src)].rays)
          image.push_back(primitive(ZVec(m.mat * r)));
        if (make_cone(g.cones_[i].rank, image) == f) {
          covered = true;
          break;
        }
      }
      if (!covered)
        throw Error("complex is not face-complete: cone " + std::to_string(i) + " face " +
                    encode(f.rays));
    }
  }
  return g;
}

std::vector<int> GenComplex::maps_between(int src, int dst) const {
  std::vector<int> out;
  for (size_t i = 0; i < maps_.size(); ++i)
    if (maps_[i].src == src && maps_[i].dst == dst) out.push_back(static_cast<int>(i));
  return out;
}

Eigen::Index GenComplex::dim() const {
  Eigen::Index d = 0;
  for (const auto& c : cones_) d = std::max(d, c.dim());
  return d;
}

bool GenComplex::is_smooth() const {
  for (const auto& c : cones_)
    if (!toricfact::is_smooth(c)) return false;
  return true;
}

std::string GenComplex::key() const {
  std::ostringstream os;
  for (const auto& c : cones_) os << c.key() << "|";
  os << "/";
  for (const auto& m : maps_) os << m.key() << "|";
  return os.str();
}

bool is_cone_complex(const GenComplex& s) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& m : s.maps()) ++count[{m.src, m.dst}];
  for (const auto& [k, c] : count)
    if (c > 1) return false;
  return true;
}

ReduceResult reduce(const GenComplex& s) {
  const int n = static_cast<int>(s.cones().size());
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  auto unite = [&](int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); };

  std::vector<const FaceMapRec*> iso_maps;
  for (const auto& m : s.maps())
    if (s.cones()[static_cast<size_t>(m.src)].dim() == s.cones()[static_cast<size_t>(m.dst)].dim()) {
      iso_maps.push_back(&m);
      unite(m.src, m.dst);
    }

  // canonical representative per class
  std::map<int, int> rep_of_root;
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    auto it = rep_of_root.find(r);
    if (it == rep_of_root.end()) {
      rep_of_root[r] = i;
    } else {
      const Cone& cur = s.cones()[static_cast<size_t>(it->second)];
      const Cone& cand = s.cones()[static_cast<size_t>(i)];
      if (cand.key() < cur.key() || (cand.key() == cur.key() && i < it->second))
        it->second = i;
    }
  }

  // matrices into the representative via BFS over iso edges
  std::vector<ZMat> to_rep(static_cast<size_t>(n));
  std::vector<bool> have(static_cast<size_t>(n), false);
  for (const auto& [root, rep] : rep_of_root) {
    to_rep[static_cast<size_t>(rep)] = zident(s.cones()[static_cast<size_t>(rep)].rank);
    have[static_cast<size_t>(rep)] = true;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto* m : iso_maps) {
      if (have[static_cast<size_t>(m->src)] && !have[static_cast<size_t>(m->dst)]) {
        to_rep[static_cast<size_t>(m->dst)] =
            to_rep[static_cast<size_t>(m->src)] * inverse_unimodular(m->mat);
        have[static_cast<size_t>(m->dst)] = true;
        changed = true;
      }
      if (have[static_cast<size_t>(m->dst)] && !have[static_cast<size_t>(m->src)]) {
        to_rep[static_cast<size_t>(m->src)] = to_rep[static_cast<size_t>(m->dst)] * m->mat;
        have[static_cast<size_t>(m->src)] = true;
        changed = true;
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (!have[static_cast<size_t>(i)]) throw Error("reduce: disconnected isomorphism class");

  // order classes canonically
  std::vector<int> reps;
  for (const auto& [root, rep] : rep_of_root) reps.push_back(rep);
  std::sort(reps.begin(), reps.end(), [&](int a, int b) {
    const Cone& ca = s.cones()[static_cast<size_t>(a)];
    const Cone& cb = s.cones()[static_cast<size_t>(b)];
    if (ca.dim() != cb.dim()) return ca.dim() < cb.dim();
    if (ca.key() != cb.key()) return ca.key() < cb.key();
    return a < b;
  });
  std::map<int, int> class_index; // rep original index -> reduced index
  for (size_t k = 0; k < reps.size(); ++k) class_index[reps[k]] = static_cast<int>(k);

  ReduceResult rr;
  rr.class_of.resize(static_cast<size_t>(n));
  rr.to_rep = to_rep;
  std::vector<Cone> red_cones;
  for (int rep : reps) red_cones.push_back(s.cones()[static_cast<size_t>(rep)]);
  for (int i = 0; i < n; ++i)
    rr.class_of[static_cast<size_t>(i)] = class_index[rep_of_root[find(i)]];

  std::map<std::string, FaceMapRec> red_maps;
  for (const auto& m : s.maps()) {
    int ca = rr.class_of[static_cast<size_t>(m.src)];
    int cb = rr.class_of[static_cast<size_t>(m.dst)];
    ZMat induced = to_rep[static_cast<size_t>(m.dst)] * m.mat *
                   inverse_unimodular(to_rep[static_cast<size_t>(m.src)]);
    FaceMapRec rm{ca, cb, induced};
    red_maps[rm.key()] = rm;
  }
  std::vector<FaceMapRec> red_list;
  for (const auto& [k, v] : red_maps) red_list.push_back(v);
  rr.reduced = GenComplex::build(red_cones, red_list, false);

  rr.witness.cone_to.resize(reps.size());
  rr.witness.mats.resize(reps.size());
  for (size_t k = 0; k < reps.size(); ++k) {
    rr.witness.cone_to[k] = reps[k];
    rr.witness.mats[k] = zident(s.cones()[static_cast<size_t>(reps[k])].rank);
  }
  return rr;
}

bool morphism_valid(const GenComplex& src, const GenComplex& dst, const ComplexMorphism& phi,
                    bool require_face_map, std::string* why) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  if (phi.cone_to.size() != src.cones().size() || phi.mats.size() != src.cones().size())
    return fail("morphism size mismatch");
  for (size_t a = 0; a < src.cones().size(); ++a) {
    int t = phi.cone_to[a];
    if (t < 0 || t >= static_cast<int>(dst.cones().size())) return fail("target index out of range");
    const Cone& ca = src.cones()[a];
    const Cone& ct = dst.cones()[static_cast<size_t>(t)];
    const ZMat& m = phi.mats[a];
    if (m.rows() != ct.rank || m.cols() != ca.rank) return fail("component matrix shape mismatch");
    if (require_face_map) {
      FaceMapRec fm{0, 0, m};
      std::vector<Cone> two{ca, ct};
      fm.src = 0;
      fm.dst = 1;
      std::string w;
      if (!map_is_valid(two, fm, &w)) return fail("component is not a face map: " + w);
    } else {
      // cone map: image of the cone must land inside the target cone
      for (const auto& r : ca.rays)
        if (!contains(ct, ZVec(m * r), Strictness::Boundary))
          return fail("component does not map the cone into the target cone");
    }
  }
  for (const auto& nu : src.maps()) {
    int ta = phi.cone_to[static_cast<size_t>(nu.src)];
    int tb = phi.cone_to[static_cast<size_t>(nu.dst)];
    ZMat lhs = phi.mats[static_cast<size_t>(nu.dst)] * nu.mat;
    bool found = false;
    for (int mi : dst.maps_between(ta, tb)) {
      ZMat rhs = dst.maps()[static_cast<size_t>(mi)].mat * phi.mats[static_cast<size_t>(nu.src)];
      if (compare(lhs, rhs) == 0) {
        found = true;
        break;
      }
    }
    if (!found) return fail("morphism is not compatible with the face maps");
  }
  return true;
}

bool morphism_surjective(const GenComplex& src, const GenComplex& dst, const ComplexMorphism& phi) {
  ReduceResult rd = reduce(dst);
  std::set<int> hit;
  for (size_t a = 0; a < src.cones().size(); ++a) {
    const Cone& ca = src.cones()[a];
    const Cone& ct = dst.cones()[static_cast<size_t>(phi.cone_to[a])];
    if (ca.dim() == ct.dim()) hit.insert(rd.class_of[static_cast<size_t>(phi.cone_to[a])]);
  }
  return hit.size() == rd.reduced.cones().size();
}

bool is_isomorphism(const GenComplex& src, const GenComplex& dst, const ComplexMorphism& phi) {
  if (!morphism_valid(src, dst, phi, true)) return false;
  ReduceResult rs = reduce(src);
  ReduceResult rd = reduce(dst);
  const size_t ns = rs.reduced.cones().size();
  const size_t nd = rd.reduced.cones().size();
  if (ns != nd) return false;

  // induced map on classes, via the class of the image face
  std::vector<int> cls_map(ns, -1);
  std::vector<ZMat> cls_iso(ns);
  for (size_t k = 0; k < ns; ++k) {
    int a = rs.witness.cone_to[k]; // original rep
    int t = phi.cone_to[static_cast<size_t>(a)];
    const Cone& ca = src.cones()[static_cast<size_t>(a)];
    const Cone& ct = dst.cones()[static_cast<size_t>(t)];
    const ZMat& pm = phi.mats[static_cast<size_t>(a)];
    std::vector<ZVec> image;
    for (const auto& r : ca.rays) image.push_back(primitive(ZVec(pm * r)));
    Cone img = make_cone(ct.rank, image);
    // find a dst cone mapping onto this face
    int best_cls = -1;
    ZMat best_iso;
    for (const auto& m : dst.maps()) {
      if (m.dst != t) continue;
      const Cone& cs = dst.cones()[static_cast<size_t>(m.src)];
      if (cs.dim() != ca.dim()) continue;
      std::vector<ZVec> im2;
      for (const auto& r : cs.rays) im2.push_back(primitive(ZVec(m.mat * r)));
      if (!(make_cone(ct.rank, im2) == img)) continue;
      int cls = rd.class_of[static_cast<size_t>(m.src)];
      if (best_cls >= 0 && cls >= best_cls) continue;
      // iso ca -> cs through the shared face: solve m.mat * X = pm
      ZMat x = solve_exact_matrix(m.mat, pm);
      best_cls = cls;
      best_iso = rd.to_rep[static_cast<size_t>(m.src)] * x;
    }
    if (best_cls < 0) return false;
    cls_map[k] = best_cls;
    cls_iso[k] = best_iso; // rep_src(original coords) -> rep_dst coords... adjusted below
  }
  std::set<int> image_cls(cls_map.begin(), cls_map.end());
  if (image_cls.size() != ns) return false;

  // self-face-map groups must correspond under the class isomorphisms
  for (size_t k = 0; k < ns; ++k) {
    int rep_s = rs.witness.cone_to[k];
    (void)rep_s;
    ZMat a_iso = cls_iso[k]; // src rep -> dst rep coordinates
    std::set<std::string> auts;
    for (int mi : rs.reduced.maps_between(static_cast<int>(k), static_cast<int>(k))) {
      ZMat conj = a_iso * rs.reduced.maps()[static_cast<size_t>(mi)].mat * inverse_unimodular(a_iso);
      auts.insert(encode(conj));
    }
    std::set<std::string> target_auts;
    for (int mi : rd.reduced.maps_between(cls_map[k], cls_map[k]))
      target_auts.insert(encode(rd.reduced.maps()[static_cast<size_t>(mi)].mat));
    if (auts != target_auts) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

std::vector<ZVec> essential_functionals(const Cone& c, const std::vector<ZVec>& fns) {
  std::vector<ZVec> dedup;
  std::set<std::string> seen;
  for (const auto& l : fns)
    if (seen.insert(to_string(l)).second) dedup.push_back(l);
  if (c.rays.empty()) return {ZVec::Zero(0)};
  std::vector<ZVec> out;
  for (const auto& l : dedup) {
    std::vector<ZVec> hs = facet_normals(c);
    for (const auto& o : dedup) {
      if (lex_compare(o, l) == 0) continue;
      hs.push_back(o - l);
    }
    std::vector<ZVec> lin;
    for (Eigen::Index k = 0; k < c.rank; ++k) {
      ZVec e = ZVec::Zero(c.rank);
      e(k) = 1;
      lin.push_back(e);
    }
    DDResult dd = dual_description(lin, hs);
    if (dd.rays.empty()) continue;
    Cone region = make_cone(c.rank, dd.rays);
    if (region.dim() == c.dim()) out.push_back(l);
  }
  sort_rays(out);
  if (out.empty()) throw Error("essential_functionals: no full-dimensional region");
  return out;
}

bool pl_equal_on_cone(const Cone& c, const std::vector<ZVec>& a, const std::vector<ZVec>& b) {
  if (a.empty() || b.empty()) throw Error("pl_equal_on_cone: empty functional list");
  if (c.rays.empty()) return true; // every functional vanishes at the origin
  return ray_list_equal(essential_functionals(c, a), essential_functionals(c, b));
}

bool pl_compatible(const GenComplex& s, const PLDatum& f, std::string* why) {
  if (f.fn.size() != s.cones().size()) {
    if (why) *why = "PL datum size mismatch";
    return false;
  }
  for (size_t i = 0; i < s.cones().size(); ++i) {
    if (f.fn[i].empty()) {
      if (why) *why = "empty functional list";
      return false;
    }
    for (const auto& l : f.fn[i])
      if (l.size() != s.cones()[i].rank) {
        if (why) *why = "functional dimension mismatch";
        return false;
      }
  }
  for (const auto& m : s.maps()) {
    std::vector<ZVec> pulled;
    for (const auto& l : f.fn[static_cast<size_t>(m.dst)]) pulled.push_back(m.mat.transpose() * l);
    if (!pl_equal_on_cone(s.cones()[static_cast<size_t>(m.src)], f.fn[static_cast<size_t>(m.src)],
                          pulled)) {
      if (why) *why = "datum incompatible with face map " + m.key();
      return false;
    }
  }
  return true;
}

PLDatum pullback_pl(const GenComplex& src, const GenComplex&, const ComplexMorphism& phi,
                    const PLDatum& f) {
  PLDatum out;
  out.fn.resize(src.cones().size());
  for (size_t a = 0; a < src.cones().size(); ++a) {
    for (const auto& l : f.fn[static_cast<size_t>(phi.cone_to[a])])
      out.fn[a].push_back(phi.mats[a].transpose() * l);
    sort_rays(out.fn[a]);
  }
  return out;
}

// ---------------------------------------------------------------------------

SubdivState::SubdivState(GenComplex base) : base_(std::move(base)) {
  for (const auto& c : base_.cones()) charts_.push_back(fan_of_cone(c));
}

bool SubdivState::is_trivial() const {
  for (size_t i = 0; i < charts_.size(); ++i)
    if (!trivial_on_chart(i)) return false;
  return true;
}

bool SubdivState::trivial_on_chart(size_t i) const {
  return charts_[i].max_cones().size() == 1 && charts_[i].max_cones()[0] == base_.cones()[i];
}

Fan restrict_chart(const Fan& f, const Cone& chart_cone, const ZMat& face_map_mat,
                   const Cone& face_cone) {
  std::vector<ZVec> image;
  for (const auto& r : face_cone.rays) image.push_back(primitive(ZVec(face_map_mat * r)));
  Cone img = make_cone(chart_cone.rank, image);
  std::vector<Cone> pieces;
  QMat mq = to_q(face_map_mat);
  for (const auto& p : f.max_cones()) {
    Cone inter = img.rays.empty() ? img : intersect_cones(p, img);
    if (inter.dim() != img.dim()) continue;
    std::vector<ZVec> back;
    for (const auto& r : inter.rays) {
      auto x = solve(mq, to_q(r));
      if (!x) throw Error("restrict_chart: ray outside the face image");
      back.push_back(clear_denominators(*x));
    }
    pieces.push_back(make_cone(face_cone.rank, back));
  }
  return Fan(face_cone.rank, pieces);
}

void SubdivState::validate(bool check_partition) const {
  for (const auto& m : base_.maps()) {
    Fan restricted = restrict_chart(charts_[static_cast<size_t>(m.dst)],
                                    base_.cones()[static_cast<size_t>(m.dst)], m.mat,
                                    base_.cones()[static_cast<size_t>(m.src)]);
    if (!(restricted == charts_[static_cast<size_t>(m.src)]))
      throw Error("subdivision charts are inconsistent across face map " + m.key());
  }
  if (check_partition) {
    for (size_t i = 0; i < charts_.size(); ++i) {
      if (base_.cones()[i].rays.empty()) continue;
      bool all_simplicial = true;
      for (const auto& p : charts_[i].max_cones())
        if (!p.is_simplicial()) all_simplicial = false;
      if (!all_simplicial) continue;
      if (!partition_check(base_.cones()[i], charts_[i].max_cones()))
        throw Error("subdivision pieces do not partition chart " + std::to_string(i));
    }
  }
}

bool SubdivState::refines(const SubdivState& other) const {
  if (!(base_ == other.base_)) return false;
  for (size_t i = 0; i < charts_.size(); ++i)
    if (!charts_[i].refines(other.charts_[i])) return false;
  return true;
}

SubdivState SubdivState::common_refinement(const SubdivState& other) const {
  if (!(base_ == other.base_)) throw Error("common_refinement: different bases");
  SubdivState out(base_);
  for (size_t i = 0; i < charts_.size(); ++i)
    out.charts_[i] = charts_[i].common_refinement(other.charts_[i]);
  return out;
}

bool SubdivState::operator==(const SubdivState& o) const { return key() == o.key(); }

std::string SubdivState::key() const {
  std::ostringstream os;
  for (const auto& f : charts_) os << f.key() << "&";
  return os.str();
}

CenterRef barycentric_center(const Cone& face) { return {face, barycenter(face)}; }

bool CenterSet::empty() const {
  for (const auto& v : per_chart)
    if (!v.empty()) return false;
  return true;
}

bool CenterSet::all_barycentric() const {
  for (const auto& v : per_chart)
    for (const auto& c : v)
      if (lex_compare(c.point, barycenter(c.face)) != 0) return false;
  return true;
}

CenterSet activate_centers(const SubdivState& s, const CenterSet& seed) {
  const auto& base = s.base();
  std::vector<std::map<std::string, CenterRef>> acc(base.cones().size());
  std::vector<std::pair<size_t, CenterRef>> work;
  auto push = [&](size_t chart, const CenterRef& c) {
    std::string k = c.key();
    if (acc[chart].count(k)) return;
    acc[chart][k] = c;
    work.push_back({chart, c});
  };
  for (size_t i = 0; i < seed.per_chart.size(); ++i)
    for (const auto& c : seed.per_chart[i]) push(i, c);
  while (!work.empty()) {
    auto [chart, c] = work.back();
    work.pop_back();
    for (const auto& m : base.maps()) {
      if (m.src == static_cast<int>(chart)) {
        std::vector<ZVec> image;
        for (const auto& r : c.face.rays) image.push_back(primitive(ZVec(m.mat * r)));
        CenterRef fwd{make_cone(base.cones()[static_cast<size_t>(m.dst)].rank, image),
                      primitive(ZVec(m.mat * c.point))};
        push(static_cast<size_t>(m.dst), fwd);
      }
      if (m.dst == static_cast<int>(chart)) {
        const Cone& srcc = base.cones()[static_cast<size_t>(m.src)];
        std::vector<ZVec> image;
        for (const auto& r : srcc.rays) image.push_back(primitive(ZVec(m.mat * r)));
        Cone img = make_cone(base.cones()[chart].rank, image);
        bool inside = true;
        for (const auto& r : c.face.rays)
          if (!contains(img, r, Strictness::Boundary)) {
            inside = false;
            break;
          }
        if (!inside) continue;
        QMat mq = to_q(m.mat);
        std::vector<ZVec> back;
        for (const auto& r : c.face.rays) {
          auto x = solve(mq, to_q(r));
          if (!x) throw Error("activate_centers: inconsistent transport");
          back.push_back(clear_denominators(*x));
        }
        auto pt = solve(mq, to_q(c.point));
        if (!pt) throw Error("activate_centers: inconsistent point transport");
        push(static_cast<size_t>(m.src),
             {make_cone(srcc.rank, back), primitive(clear_denominators(*pt))});
      }
    }
  }
  CenterSet out;
  out.per_chart.resize(base.cones().size());
  for (size_t i = 0; i < acc.size(); ++i)
    for (const auto& [k, c] : acc[i]) out.per_chart[i].push_back(c);
  return out;
}

void star_round(SubdivState& s, const CenterSet& centers) {
  if (centers.per_chart.size() != s.base().cones().size())
    throw Error("star_round: center set size mismatch");
  for (size_t i = 0; i < centers.per_chart.size(); ++i) {
    const auto& cs = centers.per_chart[i];
    for (const auto& c : cs) {
      if (c.face.rays.empty()) throw Error("star_round: zero cone cannot be a center");
      bool found = false;
      for (const auto& p : s.chart(i).all_cones())
        if (p == c.face) {
          found = true;
          break;
        }
      if (!found) throw Error("star_round: center is not a cone of the complex");
      if (!contains(c.face, c.point, Strictness::Interior))
        throw Error("star_round: star point outside the relative interior of its center");
    }
    for (size_t a = 0; a < cs.size(); ++a)
      for (size_t b = 0; b < cs.size(); ++b) {
        if (a == b) continue;
        if (cs[a].face.rays.size() < cs[b].face.rays.size() &&
            is_face_of(cs[b].face, cs[a].face.rays))
          throw Error("star_round: one center is a face of another");
      }
  }
  for (size_t i = 0; i < centers.per_chart.size(); ++i) {
    std::vector<CenterRef> cs = centers.per_chart[i];
    std::sort(cs.begin(), cs.end(),
              [](const CenterRef& a, const CenterRef& b) { return a.key() < b.key(); });
    Fan f = s.chart(i);
    for (const auto& c : cs) f = f.star_subdivide(c.point);
    s.chart(i) = f;
  }
}

void desingularize_state(SubdivState& s, int max_steps) {
  for (int step = 0; step < max_steps; ++step) {
    // canonically smallest non-smooth piece across all charts
    int chart = -1;
    Cone bad;
    for (size_t i = 0; i < s.charts().size(); ++i)
      for (const auto& p : s.chart(i).all_cones()) {
        if (toricfact::is_smooth(p)) continue;
        if (chart < 0 || p.dim() < bad.dim() ||
            (p.dim() == bad.dim() && encode(p.rays) < encode(bad.rays)) ||
            (p.dim() == bad.dim() && encode(p.rays) == encode(bad.rays) &&
             static_cast<int>(i) < chart)) {
          chart = static_cast<int>(i);
          bad = p;
        }
      }
    if (chart < 0) return;
    // shortest fundamental lattice point (simplicial) or a splitting ray
    std::vector<ZVec> candidates;
    {
      ZVec boxmax = ZVec::Zero(bad.rank), boxmin = ZVec::Zero(bad.rank);
      for (Eigen::Index i = 0; i < bad.rank; ++i)
        for (const auto& r : bad.rays) {
          if (r(i) > 0) boxmax(i) += r(i);
          if (r(i) < 0) boxmin(i) += r(i);
        }
      std::vector<ZVec> points;
      ZVec cursor = boxmin;
      for (;;) {
        points.push_back(cursor);
        Eigen::Index i = 0;
        for (; i < bad.rank; ++i) {
          if (cursor(i) < boxmax(i)) {
            cursor(i) += 1;
            for (Eigen::Index j = 0; j < i; ++j) cursor(j) = boxmin(j);
            break;
          }
        }
        if (i == bad.rank) break;
      }
      QMat rq = to_q(bad.ray_matrix());
      for (const auto& p : points) {
        if (is_zero(p)) continue;
        if (bad.is_simplicial()) {
          auto lam = solve(rq, to_q(p));
          if (!lam) continue;
          bool fundamental = true;
          for (Eigen::Index i = 0; i < lam->size(); ++i)
            if ((*lam)(i) < 0 || (*lam)(i) >= 1) fundamental = false;
          if (fundamental) candidates.push_back(primitive(p));
        } else if (contains(bad, p, Strictness::Interior)) {
          candidates.push_back(primitive(p));
        }
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const ZVec& a, const ZVec& b) {
      Int la = a.dot(a), lb = b.dot(b);
      if (la != lb) return la < lb;
      return lex_less(a, b);
    });
    bool progressed = false;
    for (const auto& w : candidates) {
      // star the activation orbit of (minimal face of w, w)
      std::vector<ZVec> frays;
      // minimal piece of the chart containing w in its relative interior
      const Cone* host = nullptr;
      for (const auto& p : s.chart(static_cast<size_t>(chart)).all_cones())
        if (contains(p, w, Strictness::Interior)) {
          if (!host || p.dim() < host->dim()) {
            static thread_local Cone hold;
            hold = p;
            host = &hold;
          }
        }
      if (!host) continue;
      CenterSet seed;
      seed.per_chart.resize(s.base().cones().size());
      seed.per_chart[static_cast<size_t>(chart)].push_back({*host, w});
      CenterSet closed = activate_centers(s, seed);
      SubdivState next = s;
      star_round(next, closed);
      if (!(next == s)) {
        s = next;
        progressed = true;
        break;
      }
    }
    if (!progressed) throw Error("desingularize_state: no progressing center found");
  }
  throw Error("desingularize_state: step bound exceeded");
}

// ---------------------------------------------------------------------------

TotalComplex materialize(const SubdivState& s) {
  const auto& base = s.base();
  struct PieceRef {
    size_t chart;
    Cone concrete;
    AbstractPiece ap;
  };
  std::vector<PieceRef> pieces;
  std::vector<std::map<std::string, int>> index(base.cones().size()); // concrete key -> piece id
  for (size_t i = 0; i < base.cones().size(); ++i) {
    for (const auto& p : s.chart(i).all_cones()) {
      PieceRef pr{i, p, abstract_of(p)};
      index[i][p.key()] = static_cast<int>(pieces.size());
      pieces.push_back(pr);
    }
  }
  std::vector<Cone> cones;
  for (const auto& pr : pieces) cones.push_back(pr.ap.cone);

  std::vector<FaceMapRec> gens;
  // within-chart face inclusions
  for (size_t i = 0; i < base.cones().size(); ++i) {
    for (const auto& p : s.chart(i).all_cones()) {
      int pid = index[i][p.key()];
      for (const auto& f : faces(p)) {
        auto it = index[i].find(f.key());
        if (it == index[i].end()) throw Error("materialize: missing face piece");
        int fid = it->second;
        if (fid == pid) continue;
        ZMat m = pieces[static_cast<size_t>(pid)].ap.coords *
                 pieces[static_cast<size_t>(fid)].ap.embed;
        gens.push_back({fid, pid, m});
      }
    }
  }
  // cross-chart transports along base maps
  for (const auto& bm : base.maps()) {
    if (bm.src == bm.dst && compare(bm.mat, zident(base.cones()[static_cast<size_t>(bm.src)].rank)) == 0)
      continue;
    for (const auto& p : s.chart(static_cast<size_t>(bm.src)).all_cones()) {
      int pid = index[static_cast<size_t>(bm.src)][p.key()];
      std::vector<ZVec> image;
      for (const auto& r : p.rays) image.push_back(primitive(ZVec(bm.mat * r)));
      Cone img = make_cone(base.cones()[static_cast<size_t>(bm.dst)].rank, image);
      auto it = index[static_cast<size_t>(bm.dst)].find(img.key());
      if (it == index[static_cast<size_t>(bm.dst)].end())
        throw Error("materialize: chart images are inconsistent");
      int qid = it->second;
      ZMat m = pieces[static_cast<size_t>(qid)].ap.coords * bm.mat *
               pieces[static_cast<size_t>(pid)].ap.embed;
      gens.push_back({pid, qid, m});
    }
  }

  GenComplex diagram = GenComplex::build(cones, gens, false);
  ReduceResult rr = reduce(diagram);

  TotalComplex tc;
  tc.total = rr.reduced;
  tc.piece_class.resize(base.cones().size());
  for (size_t i = 0; i < base.cones().size(); ++i)
    for (const auto& p : s.chart(i).max_cones())
      tc.piece_class[i].push_back(rr.class_of[static_cast<size_t>(index[i][p.key()])]);

  const size_t ncls = rr.reduced.cones().size();
  tc.carrier_base.assign(ncls, -1);
  tc.carrier_embed.resize(ncls);
  for (size_t k = 0; k < ncls; ++k) {
    int rep = rr.witness.cone_to[k];
    const PieceRef& pr = pieces[static_cast<size_t>(rep)];
    const Cone& bc = base.cones()[pr.chart];
    // minimal base face containing the piece
    std::vector<ZVec> face_rays;
    if (pr.concrete.rays.empty()) {
      // zero piece: carrier is a zero cone of the base
    } else {
      ZVec z = ZVec::Zero(bc.rank);
      for (const auto& r : pr.concrete.rays) z += r;
      for (int ri : minimal_face_ray_indices(bc, z)) face_rays.push_back(bc.rays[static_cast<size_t>(ri)]);
    }
    Cone face = make_cone(bc.rank, face_rays);
    // base cone mapping onto this face
    for (const auto& m : base.maps()) {
      if (m.dst != static_cast<int>(pr.chart)) continue;
      const Cone& cs = base.cones()[static_cast<size_t>(m.src)];
      if (cs.dim() != face.dim()) continue;
      std::vector<ZVec> im;
      for (const auto& r : cs.rays) im.push_back(primitive(ZVec(m.mat * r)));
      if (!(make_cone(bc.rank, im) == face)) continue;
      if (tc.carrier_base[k] >= 0 && m.src >= tc.carrier_base[k]) continue;
      tc.carrier_base[k] = m.src;
      // embed: total rep cone -> carrier coords: solve m.mat * X = embed
      tc.carrier_embed[k] = solve_exact_matrix(m.mat, pr.ap.embed);
    }
    if (tc.carrier_base[k] < 0) throw Error("materialize: carrier not found (complex not face-complete?)");
  }
  return tc;
}

// ---------------------------------------------------------------------------

StarResult star_subdivide(const GenComplex& s, const std::vector<int>& center_cones,
                          bool require_smooth) {
  SubdivState state(s);
  CenterSet seed;
  seed.per_chart.resize(s.cones().size());
  for (int c : center_cones) {
    if (c < 0 || c >= static_cast<int>(s.cones().size()))
      throw Error("star_subdivide: center index out of range");
    for (const auto& m : s.maps()) {
      if (m.src != c) continue;
      std::vector<ZVec> image;
      for (const auto& r : s.cones()[static_cast<size_t>(c)].rays)
        image.push_back(primitive(ZVec(m.mat * r)));
      seed.per_chart[static_cast<size_t>(m.dst)].push_back(
          barycentric_center(make_cone(s.cones()[static_cast<size_t>(m.dst)].rank, image)));
    }
  }
  CenterSet centers = activate_centers(state, seed);
  star_round(state, centers);
  state.validate();
  StarResult out;
  out.subdivision = state;
  TotalComplex tc = materialize(state);
  out.complex = tc.total;
  out.step.centers = centers;
  if (require_smooth) {
    for (const auto& c : out.complex.cones())
      if (!toricfact::is_smooth(c))
        throw Error("non-smooth star subdivision: offending cone " + c.key());
  }
  return out;
}

BarycentricResult barycentric_subdivision(const GenComplex& s) {
  BarycentricResult out;
  ReduceResult r0 = reduce(s);
  out.input_class_of = r0.class_of;

  SubdivState state(s);
  for (Eigen::Index d = s.dim(); d >= 1; --d) {
    CenterSet centers;
    centers.per_chart.resize(s.cones().size());
    for (size_t i = 0; i < s.cones().size(); ++i)
      for (const auto& f : faces(s.cones()[i]))
        if (f.dim() == d) centers.per_chart[i].push_back(barycentric_center(f));
    if (centers.empty()) continue;
    star_round(state, centers);
    out.witness.push_back({centers});
  }
  state.validate();
  out.subdivision = state;
  TotalComplex tc = materialize(state);
  out.complex = tc.total;

  // flags: per reduced cone, the input classes of the faces whose barycenters
  // span it, read off the carrier representative of each class
  out.flags.resize(out.complex.cones().size());
  out.ray_class.resize(out.complex.cones().size());
  for (size_t k = 0; k < out.complex.cones().size(); ++k) {
    int cb = tc.carrier_base[k];
    const ZMat& ce = tc.carrier_embed[k];
    const Cone& ccone = out.complex.cones()[k];
    const Cone& carrier_cone = s.cones()[static_cast<size_t>(cb)];
    std::vector<int> flag;
    for (const auto& r : ccone.rays) {
      ZVec conc = ce * r; // in carrier base cone coordinates
      std::vector<ZVec> frays;
      for (int ri : minimal_face_ray_indices(carrier_cone, conc))
        frays.push_back(carrier_cone.rays[static_cast<size_t>(ri)]);
      Cone face = make_cone(carrier_cone.rank, frays);
      // the ray must be the barycenter of its minimal face
      if (lex_compare(barycenter(face), conc) != 0)
        throw Error("barycentric_subdivision: ray is not a face barycenter");
      // input cone mapping onto this face, smallest class id
      int best = -1;
      for (const auto& m : s.maps()) {
        if (m.dst != cb) continue;
        const Cone& cs = s.cones()[static_cast<size_t>(m.src)];
        if (cs.dim() != face.dim()) continue;
        std::vector<ZVec> im;
        for (const auto& rr2 : cs.rays) im.push_back(primitive(ZVec(m.mat * rr2)));
        if (!(make_cone(carrier_cone.rank, im) == face)) continue;
        int cls = r0.class_of[static_cast<size_t>(m.src)];
        if (best < 0 || cls < best) best = cls;
      }
      if (best < 0) throw Error("barycentric_subdivision: flag face not addressable");
      flag.push_back(best);
    }
    out.ray_class[k] = flag;
    std::sort(flag.begin(), flag.end(), [&](int a, int b) {
      Eigen::Index da = r0.reduced.cones()[static_cast<size_t>(a)].dim();
      Eigen::Index db = r0.reduced.cones()[static_cast<size_t>(b)].dim();
      if (da != db) return da < db;
      return a < b;
    });
    flag.erase(std::unique(flag.begin(), flag.end()), flag.end());
    if (flag.size() != ccone.rays.size())
      throw Error("barycentric_subdivision: repeated class in a flag");
    out.flags[k] = flag;
  }
  return out;
}

FanEmbedding embed_barycentric_as_fan(const BarycentricResult& b) {
  if (!is_cone_complex(b.complex))
    throw Error("embed_barycentric_as_fan: input is not a cone complex");
  if (!b.complex.is_smooth())
    throw Error("embed_barycentric_as_fan: input is not nonsingular");
  // one coordinate per nonzero input class (flags never mention zero cones)
  int nraw = 0;
  for (int c : b.input_class_of) nraw = std::max(nraw, c + 1);
  std::vector<int> coord_of(static_cast<size_t>(nraw), -1);
  int nclasses = 0;
  for (const auto& flag : b.flags)
    for (int c : flag) {
      if (c < 0 || c >= nraw) throw Error("embed_barycentric_as_fan: invalid flag data");
      if (coord_of[static_cast<size_t>(c)] < 0) coord_of[static_cast<size_t>(c)] = 0;
    }
  for (size_t c = 0; c < coord_of.size(); ++c)
    if (coord_of[c] == 0) coord_of[c] = nclasses++;

  std::vector<Cone> image_cones;
  for (const auto& flag : b.flags) {
    std::vector<ZVec> rays;
    for (int c : flag) {
      ZVec e = ZVec::Zero(nclasses);
      e(coord_of[static_cast<size_t>(c)]) = 1;
      rays.push_back(e);
    }
    image_cones.push_back(make_cone(nclasses, rays));
  }
  FanEmbedding out;
  out.fan = Fan(nclasses, image_cones);
  FanAsComplex fc = fan_to_complex(out.fan);
  out.fan_complex = fc.complex;

  // morphism B(Delta) -> fan_complex
  out.iso.cone_to.resize(b.complex.cones().size());
  out.iso.mats.resize(b.complex.cones().size());
  for (size_t k = 0; k < b.complex.cones().size(); ++k) {
    const Cone& src = b.complex.cones()[k];
    const Cone& img = image_cones[k];
    // find fan_complex cone equal to the abstract image
    AbstractPiece ap = abstract_of(img);
    int target = -1;
    for (size_t j = 0; j < fc.complex.cones().size(); ++j)
      if (fc.complex.cones()[j] == ap.cone) {
        // require the same embedded cone
        std::vector<ZVec> emb;
        for (const auto& r : fc.complex.cones()[j].rays)
          emb.push_back(primitive(ZVec(fc.embed[j] * r)));
        Cone embc = make_cone(nclasses, emb);
        if (embc == img) {
          target = static_cast<int>(j);
          break;
        }
      }
    if (target < 0) throw Error("embed_barycentric_as_fan: image cone missing in fan");
    // matrix: ray j of src maps to the unit vector of its class
    if (src.rays.empty()) {
      out.iso.cone_to[k] = target;
      out.iso.mats[k] = ZMat(0, 0);
      continue;
    }
    ZMat units(nclasses, static_cast<Eigen::Index>(src.rays.size()));
    units.setZero();
    for (size_t j = 0; j < src.rays.size(); ++j)
      units(coord_of[static_cast<size_t>(b.ray_class[k][j])], static_cast<Eigen::Index>(j)) = 1;
    ZMat full = units * inverse_unimodular(src.ray_matrix()); // src coords -> Z^{nclasses}
    ZMat m = solve_exact_matrix(fc.embed[static_cast<size_t>(target)], full);
    out.iso.cone_to[k] = target;
    out.iso.mats[k] = m;
  }
  return out;
}

FanAsComplex fan_to_complex(const Fan& f) {
  FanAsComplex out;
  std::vector<Cone> all = f.all_cones();
  std::vector<AbstractPiece> aps;
  for (const auto& c : all) aps.push_back(abstract_of(c));
  std::vector<Cone> cones;
  for (const auto& ap : aps) cones.push_back(ap.cone);
  std::vector<FaceMapRec> gens;
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = 0; j < all.size(); ++j) {
      if (i == j) continue;
      if (all[i].rays.size() > all[j].rays.size()) continue;
      bool face = true;
      for (const auto& r : all[i].rays)
        if (!contains(all[j], r, Strictness::Boundary)) {
          face = false;
          break;
        }
      if (!face) continue;
      gens.push_back({static_cast<int>(i), static_cast<int>(j),
                      ZMat(aps[j].coords * aps[i].embed)});
    }
  out.complex = GenComplex::build(cones, gens, false);
  for (const auto& ap : aps) out.embed.push_back(ap.embed);
  for (const auto& mc : f.max_cones()) {
    for (size_t i = 0; i < all.size(); ++i)
      if (all[i] == mc) out.max_index.push_back(static_cast<int>(i));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<ZMat> cone_isomorphisms(const Cone& a, const Cone& b) {
  std::vector<ZMat> out;
  if (a.rank != b.rank || a.rays.size() != b.rays.size() || a.dim() != b.dim()) return out;
  if (a.rays.empty()) {
    out.push_back(ZMat(0, 0));
    return out;
  }
  const size_t k = a.rays.size();
  // choose a set of rank-many independent rays of a (deterministic greedy)
  std::vector<size_t> pivots;
  {
    ZMat acc(a.rank, 0);
    for (size_t i = 0; i < k && static_cast<Eigen::Index>(pivots.size()) < a.rank; ++i) {
      ZMat test(a.rank, acc.cols() + 1);
      test.leftCols(acc.cols()) = acc;
      test.col(acc.cols()) = a.rays[i];
      if (rank(test) == test.cols()) {
        acc = test;
        pivots.push_back(i);
      }
    }
  }
  std::vector<size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    ZMat lhs(a.rank, static_cast<Eigen::Index>(pivots.size()));
    ZMat rhs(a.rank, static_cast<Eigen::Index>(pivots.size()));
    for (size_t t = 0; t < pivots.size(); ++t) {
      lhs.col(static_cast<Eigen::Index>(t)) = a.rays[pivots[t]];
      rhs.col(static_cast<Eigen::Index>(t)) = b.rays[perm[pivots[t]]];
    }
    // M * lhs = rhs
    QMat lq = to_q(lhs);
    QMat li = inverse(QMat(lq));
    QMat mq = to_q(rhs) * li;
    bool integral = true;
    ZMat m(a.rank, a.rank);
    for (Eigen::Index i = 0; i < a.rank && integral; ++i)
      for (Eigen::Index j = 0; j < a.rank && integral; ++j) {
        Rat r = mq(i, j);
        r.canonicalize();
        if (r.get_den() != 1) integral = false;
        else m(i, j) = r.get_num();
      }
    if (!integral) continue;
    // unimodular?
    bool unim = true;
    try {
      (void)inverse_unimodular(m);
    } catch (const Error&) {
      unim = false;
    }
    if (!unim) continue;
    bool maps_all = true;
    for (size_t i = 0; i < k && maps_all; ++i)
      if (lex_compare(primitive(ZVec(m * a.rays[i])), b.rays[perm[i]]) != 0 ||
          lex_compare(ZVec(m * a.rays[i]), b.rays[perm[i]]) != 0)
        maps_all = false;
    if (!maps_all) continue;
    bool dup = false;
    for (const auto& e : out)
      if (compare(e, m) == 0) dup = true;
    if (!dup) out.push_back(m);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

FinalObjectResult final_object(const GenComplex& s, const PLDatum& f,
                               const std::vector<int>& labels) {
  std::string why;
  if (!pl_compatible(s, f, &why)) throw Error("not a PL datum: " + why);
  if (!labels.empty() && labels.size() != s.cones().size())
    throw Error("final_object: label size mismatch");
  auto label_of = [&](int i) { return labels.empty() ? 0 : labels[static_cast<size_t>(i)]; };

  const int n = static_cast<int>(s.cones().size());
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)] =
        parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
    return x;
  };
  struct Edge {
    int a, b;
    ZMat m; // iso a -> b
  };
  std::vector<Edge> edges;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (find(a) == find(b) && a != b) continue;
      if (label_of(a) != label_of(b)) continue;
      const Cone& ca = s.cones()[static_cast<size_t>(a)];
      const Cone& cb = s.cones()[static_cast<size_t>(b)];
      if (ca.dim() != cb.dim()) continue;
      for (const auto& m : cone_isomorphisms(ca, cb)) {
        std::vector<ZVec> pulled;
        for (const auto& l : f.fn[static_cast<size_t>(b)]) pulled.push_back(m.transpose() * l);
        if (!pl_equal_on_cone(ca, f.fn[static_cast<size_t>(a)], pulled)) continue;
        edges.push_back({a, b, m});
        parent[static_cast<size_t>(find(a))] = find(b);
        break;
      }
    }

  // witness isos to class roots by BFS
  std::vector<ZMat> to_root(static_cast<size_t>(n));
  std::vector<bool> have(static_cast<size_t>(n), false);
  std::map<int, int> root_rep;
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (!root_rep.count(r)) root_rep[r] = i;
  }
  for (const auto& [r, rep] : root_rep) {
    to_root[static_cast<size_t>(rep)] = zident(s.cones()[static_cast<size_t>(rep)].rank);
    have[static_cast<size_t>(rep)] = true;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : edges) {
      if (have[static_cast<size_t>(e.a)] && !have[static_cast<size_t>(e.b)]) {
        to_root[static_cast<size_t>(e.b)] = to_root[static_cast<size_t>(e.a)] * inverse_unimodular(e.m);
        have[static_cast<size_t>(e.b)] = true;
        changed = true;
      }
      if (have[static_cast<size_t>(e.b)] && !have[static_cast<size_t>(e.a)]) {
        to_root[static_cast<size_t>(e.a)] = to_root[static_cast<size_t>(e.b)] * e.m;
        have[static_cast<size_t>(e.a)] = true;
        changed = true;
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (!have[static_cast<size_t>(i)]) throw Error("final_object: disconnected class witness");

  // canonical frame per class representative
  struct ClassData {
    int rep;
    int label;
    ZMat frame;      // rep coords -> canonical coords
    Cone cone;       // canonical presentation
    std::vector<ZVec> fset; // canonical essential functionals
  };
  std::vector<ClassData> classes;
  for (const auto& [r, rep] : root_rep) {
    const Cone& c = s.cones()[static_cast<size_t>(rep)];
    std::vector<ZVec> fess = essential_functionals(c, f.fn[static_cast<size_t>(rep)]);
    ClassData cd;
    cd.rep = rep;
    cd.label = label_of(rep);
    if (toricfact::is_smooth(c) && !c.rays.empty()) {
      // choose the ray-to-basis assignment minimizing the functional encoding
      std::vector<size_t> perm(c.rays.size());
      std::iota(perm.begin(), perm.end(), 0);
      bool first = true;
      std::string best_key;
      do {
        ZMat p(c.rank, c.rank);
        for (size_t t = 0; t < perm.size(); ++t) {
          ZVec e = ZVec::Zero(c.rank);
          e(static_cast<Eigen::Index>(perm[t])) = 1;
          p.col(static_cast<Eigen::Index>(t)) = e;
        }
        ZMat g = p * inverse_unimodular(c.ray_matrix());
        ZMat ginv_t = inverse_unimodular(g).transpose();
        std::vector<ZVec> tf;
        for (const auto& l : fess) tf.push_back(ginv_t * l);
        sort_rays(tf);
        std::string key = encode(tf);
        if (first || key < best_key) {
          first = false;
          best_key = key;
          cd.frame = g;
          cd.fset = tf;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      std::vector<ZVec> std_rays;
      for (Eigen::Index i = 0; i < c.rank; ++i) {
        ZVec e = ZVec::Zero(c.rank);
        e(i) = 1;
        std_rays.push_back(e);
      }
      cd.cone = make_cone(c.rank, std_rays);
    } else {
      cd.frame = zident(c.rank);
      cd.cone = c;
      cd.fset = fess;
    }
    classes.push_back(cd);
  }
  std::sort(classes.begin(), classes.end(), [&](const ClassData& x, const ClassData& y) {
    Eigen::Index dx = x.cone.dim(), dy = y.cone.dim();
    if (dx != dy) return dx < dy;
    std::string kx = encode(x.fset), ky = encode(y.fset);
    if (kx != ky) return kx < ky;
    if (x.label != y.label) return x.label < y.label;
    if (x.cone.key() != y.cone.key()) return x.cone.key() < y.cone.key();
    return x.rep < y.rep;
  });

  std::map<int, int> class_of_root;
  for (size_t k = 0; k < classes.size(); ++k) class_of_root[find(classes[k].rep)] = static_cast<int>(k);

  // all f-compatible face maps between canonical representatives
  std::vector<Cone> rep_cones;
  PLDatum rep_f;
  for (const auto& cd : classes) {
    rep_cones.push_back(cd.cone);
    rep_f.fn.push_back(cd.fset);
  }
  std::vector<FaceMapRec> rep_maps;
  for (size_t a = 0; a < classes.size(); ++a)
    for (size_t b = 0; b < classes.size(); ++b) {
      const Cone& ca = rep_cones[a];
      const Cone& cb = rep_cones[b];
      if (ca.dim() > cb.dim()) continue;
      for (const auto& face : faces(cb)) {
        if (face.dim() != ca.dim()) continue;
        AbstractPiece ap = abstract_of(face);
        for (const auto& m0 : cone_isomorphisms(ca, ap.cone)) {
          ZMat full = ap.embed * m0;
          std::vector<ZVec> pulled;
          for (const auto& l : rep_f.fn[b]) pulled.push_back(full.transpose() * l);
          if (!pl_equal_on_cone(ca, rep_f.fn[a], pulled)) continue;
          rep_maps.push_back({static_cast<int>(a), static_cast<int>(b), full});
        }
      }
    }

  FinalObjectResult out;
  out.complex = GenComplex::build(rep_cones, rep_maps, false);
  out.f = rep_f;
  out.g.cone_to.resize(static_cast<size_t>(n));
  out.g.mats.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    int root = find(i);
    int k = class_of_root[root];
    const ClassData& cd = classes[static_cast<size_t>(k)];
    // i -> root-rep (original coords) -> cd.rep? roots were united; rep chosen
    // per root in root_rep, while cd.rep is the same cone (root_rep[root]).
    ZMat w = to_root[static_cast<size_t>(i)]; // i -> root_rep[root] coords
    out.g.cone_to[static_cast<size_t>(i)] = k;
    out.g.mats[static_cast<size_t>(i)] = cd.frame * w;
  }
  return out;
}

SubdivState pullback_subdivision(const GenComplex& src, const GenComplex& dst,
                                 const ComplexMorphism& phi, const SubdivState& sub) {
  std::string why;
  if (!morphism_valid(src, dst, phi, true, &why)) throw Error("pullback: not a face map: " + why);
  if (!(sub.base() == dst)) throw Error("pullback: subdivision base mismatch");
  SubdivState out(src);
  for (size_t a = 0; a < src.cones().size(); ++a) {
    out.chart(a) = restrict_chart(sub.chart(static_cast<size_t>(phi.cone_to[a])),
                                  dst.cones()[static_cast<size_t>(phi.cone_to[a])], phi.mats[a],
                                  src.cones()[a]);
  }
  out.validate(false);
  return out;
}

} // namespace toricfact
