#include "toricfact/cone.hpp"

#include "toricfact/simplex.hpp"

#include <map>
#include <set>
#include <sstream>

namespace toricfact {

Eigen::Index Cone::dim() const {
  if (rays.empty()) return 0;
  return toricfact::rank(ray_matrix());
}

std::string Cone::key() const {
  std::ostringstream os;
  os << rank << ":" << encode(rays);
  return os.str();
}

namespace {

// Is v a nonnegative combination of the given generators?
bool in_nonneg_span(const std::vector<ZVec>& gens, const ZVec& v) {
  if (is_zero(v)) return true;
  if (gens.empty()) return false;
  const Eigen::Index n = v.size();
  const Eigen::Index k = static_cast<Eigen::Index>(gens.size());
  LinearProgram lp(k);
  for (Eigen::Index j = 0; j < k; ++j) lp.set_nonneg(j);
  for (Eigen::Index i = 0; i < n; ++i) {
    QVec row(k);
    for (Eigen::Index j = 0; j < k; ++j) row(j) = Rat(gens[static_cast<size_t>(j)](i));
    lp.add(row, Rel::EQ, Rat(v(i)));
  }
  return lp.maximize(QVec::Zero(k)).ok();
}

ZVec reduce_mod(const std::vector<ZVec>& lineality, const ZVec& v) {
  if (lineality.empty()) return v;
  ZMat l = cols_to_matrix(lineality, v.size());
  // v - L * x with x the least-squares-free exact solution of L x = proj;
  // we solve L x = v restricted to span(L) by solving [L | v] consistency on
  // a complement: use rational solve of L^T L x = L^T v (Gram, injective on span).
  QMat lq = to_q(l);
  QMat g = lq.transpose() * lq;
  QVec b = lq.transpose() * to_q(v);
  auto x = solve(g, b);
  if (!x) return v;
  QVec red = to_q(v) - lq * (*x);
  ZVec w = clear_denominators(red);
  return primitive(w);
}

} // namespace

Cone make_cone(Eigen::Index rank, const std::vector<ZVec>& generators) {
  Cone c;
  c.rank = rank;
  std::vector<ZVec> gens;
  std::set<std::string> seen;
  for (const auto& g : generators) {
    if (g.size() != rank) throw Error("make_cone: generator dimension mismatch");
    if (is_zero(g)) continue;
    ZVec p = primitive(g);
    std::string k = to_string(p);
    if (seen.insert(k).second) gens.push_back(p);
  }
  for (const auto& g : gens) {
    ZVec neg = -g;
    if (in_nonneg_span(gens, neg)) throw Error("make_cone: cone is not strongly convex");
  }
  // Drop non-extreme generators greedily.
  std::vector<ZVec> ext = gens;
  for (size_t i = 0; i < ext.size();) {
    std::vector<ZVec> others;
    for (size_t j = 0; j < ext.size(); ++j)
      if (j != i) others.push_back(ext[j]);
    if (in_nonneg_span(others, ext[i])) ext.erase(ext.begin() + static_cast<long>(i));
    else ++i;
  }
  sort_rays(ext);
  c.rays = ext;
  return c;
}

DDResult dual_description(std::vector<ZVec> init_lineality, const std::vector<ZVec>& halfspaces) {
  std::vector<ZVec> L;
  for (auto& l : init_lineality)
    if (!is_zero(l)) L.push_back(primitive(l));
  std::vector<ZVec> R;
  std::vector<ZVec> processed;

  auto tight_set = [&](const ZVec& r) {
    std::set<size_t> t;
    for (size_t i = 0; i < processed.size(); ++i)
      if (processed[i].dot(r) == 0) t.insert(i);
    return t;
  };

  // Rays are kept reduced modulo the lineality space so representatives are
  // unique; pairings with processed inequalities are unchanged by this.
  auto normalize = [&]() {
    std::vector<ZVec> out;
    std::set<std::string> seen;
    for (const auto& r : R) {
      ZVec w = reduce_mod(L, r);
      if (is_zero(w)) continue;
      std::string k = to_string(w);
      if (seen.insert(k).second) out.push_back(w);
    }
    R = out;
  };

  for (const auto& a : halfspaces) {
    if (is_zero(a)) continue;
    Eigen::Index piv = -1;
    for (size_t i = 0; i < L.size(); ++i)
      if (L[i].dot(a) != 0) {
        piv = static_cast<Eigen::Index>(i);
        break;
      }
    if (piv >= 0) {
      ZVec l0 = L[static_cast<size_t>(piv)];
      if (l0.dot(a) < 0) l0 = -l0;
      Int va = l0.dot(a);
      std::vector<ZVec> newL;
      for (size_t i = 0; i < L.size(); ++i) {
        if (static_cast<Eigen::Index>(i) == piv) continue;
        ZVec w = va * L[i] - L[i].dot(a) * l0;
        if (!is_zero(w)) newL.push_back(primitive(w));
      }
      std::vector<ZVec> newR;
      for (const auto& r : R) {
        ZVec w = va * r - r.dot(a) * l0;
        if (!is_zero(w)) newR.push_back(primitive(w));
      }
      newR.push_back(primitive(l0));
      L = newL;
      R = newR;
      processed.push_back(a);
      normalize();
      continue;
    }
    std::vector<ZVec> pos, zero, neg;
    for (const auto& r : R) {
      int s = sgn(r.dot(a));
      if (s > 0) pos.push_back(r);
      else if (s == 0) zero.push_back(r);
      else neg.push_back(r);
    }
    if (neg.empty()) {
      processed.push_back(a);
      continue;
    }
    std::vector<ZVec> newR = pos;
    for (auto& z : zero) newR.push_back(z);
    for (const auto& rp : pos)
      for (const auto& rm : neg) {
        // Combinatorial adjacency: no third ray's tight set contains both.
        std::set<size_t> tp = tight_set(rp), tm = tight_set(rm);
        std::set<size_t> common;
        for (auto i : tp)
          if (tm.count(i)) common.insert(i);
        bool adjacent = true;
        for (const auto& r3 : R) {
          if (&r3 == &rp || &r3 == &rm) continue;
          if (ray_list_equal({r3}, {rp}) || ray_list_equal({r3}, {rm})) continue;
          bool covers = true;
          for (auto i : common)
            if (processed[i].dot(r3) != 0) {
              covers = false;
              break;
            }
          if (covers) {
            adjacent = false;
            break;
          }
        }
        if (!adjacent) continue;
        ZVec w = rp.dot(a) * rm - rm.dot(a) * rp;
        if (!is_zero(w)) newR.push_back(primitive(w));
      }
    R = newR;
    processed.push_back(a);
    normalize();
  }

  DDResult res;
  res.lineality = L;
  res.rays = R;
  sort_rays(res.rays);
  return res;
}

std::vector<ZVec> facet_normals(const Cone& c) {
  if (c.rays.empty()) return {};
  std::vector<ZVec> basis;
  for (Eigen::Index i = 0; i < c.rank; ++i) {
    ZVec e = ZVec::Zero(c.rank);
    e(i) = 1;
    basis.push_back(e);
  }
  DDResult dd = dual_description(basis, c.rays);
  return dd.rays;
}

bool contains(const Cone& c, const ZVec& v, Strictness s) {
  if (v.size() != c.rank) throw Error("contains: dimension mismatch");
  if (c.rays.empty()) return is_zero(v);
  if (is_zero(v)) return s == Strictness::Boundary || c.dim() == 0;
  if (!in_rational_span(c.ray_matrix(), v)) return false;
  for (const auto& f : facet_normals(c)) {
    Int p = f.dot(v);
    if (p < 0) return false;
    if (s == Strictness::Interior && p == 0) return false;
  }
  return true;
}

std::vector<Cone> faces(const Cone& c) {
  std::vector<std::vector<ZVec>> face_rays;
  if (c.is_simplicial()) {
    const size_t k = c.rays.size();
    for (size_t mask = 0; mask < (size_t(1) << k); ++mask) {
      std::vector<ZVec> sub;
      for (size_t i = 0; i < k; ++i)
        if (mask & (size_t(1) << i)) sub.push_back(c.rays[i]);
      face_rays.push_back(sub);
    }
  } else {
    std::vector<ZVec> fns = facet_normals(c);
    std::set<std::string> seen;
    std::vector<std::vector<ZVec>> queue{c.rays};
    seen.insert(encode(c.rays));
    face_rays.push_back(c.rays);
    while (!queue.empty()) {
      std::vector<ZVec> cur = queue.back();
      queue.pop_back();
      for (const auto& f : fns) {
        std::vector<ZVec> sub;
        for (const auto& r : cur)
          if (f.dot(r) == 0) sub.push_back(r);
        if (sub.size() == cur.size()) continue;
        std::string k = encode(sub);
        if (seen.insert(k).second) {
          face_rays.push_back(sub);
          queue.push_back(sub);
        }
      }
    }
    bool has_zero = false;
    for (auto& fr : face_rays)
      if (fr.empty()) has_zero = true;
    if (!has_zero) face_rays.push_back({});
  }
  std::vector<Cone> out;
  for (auto& fr : face_rays) {
    Cone f;
    f.rank = c.rank;
    sort_rays(fr);
    f.rays = fr;
    out.push_back(f);
  }
  std::sort(out.begin(), out.end(), [](const Cone& a, const Cone& b) {
    Eigen::Index da = a.dim(), db = b.dim();
    if (da != db) return da < db;
    return encode(a.rays) < encode(b.rays);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Cone& a, const Cone& b) { return a == b; }),
            out.end());
  return out;
}

std::vector<int> minimal_face_ray_indices(const Cone& c, const ZVec& v) {
  if (!contains(c, v, Strictness::Boundary)) throw Error("minimal_face: point not in cone");
  std::vector<ZVec> fns = facet_normals(c);
  std::vector<int> idx;
  for (size_t i = 0; i < c.rays.size(); ++i) {
    bool in_face = true;
    for (const auto& f : fns)
      if (f.dot(v) == 0 && f.dot(c.rays[i]) != 0) {
        in_face = false;
        break;
      }
    if (in_face) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

bool is_face_of(const Cone& c, const std::vector<ZVec>& sub) {
  for (const auto& r : sub)
    if (!contains(c, r, Strictness::Boundary)) return false;
  if (sub.empty()) return true;
  ZVec z = ZVec::Zero(c.rank);
  for (const auto& r : sub) z += r;
  std::vector<int> idx = minimal_face_ray_indices(c, z);
  std::vector<ZVec> mf;
  for (int i : idx) mf.push_back(c.rays[static_cast<size_t>(i)]);
  Cone a = make_cone(c.rank, mf);
  Cone b = make_cone(c.rank, sub);
  return a == b;
}

ZVec barycenter(const Cone& c) {
  if (c.rays.empty()) throw Error("no barycenter: zero cone");
  ZVec s = ZVec::Zero(c.rank);
  for (const auto& r : c.rays) s += r;
  return primitive(s);
}

bool is_smooth(const Cone& c) {
  if (c.rays.empty()) return true;
  ZMat m = c.ray_matrix();
  if (toricfact::rank(m) != static_cast<Eigen::Index>(c.rays.size())) return false;
  for (const auto& d : smith_invariants(m))
    if (d != 1) return false;
  return true;
}

Cone intersect_cones(const Cone& a, const Cone& b) {
  if (a.rank != b.rank) throw Error("intersect_cones: rank mismatch");
  if (a.rays.empty() || b.rays.empty()) {
    Cone z;
    z.rank = a.rank;
    return z;
  }
  // span(a) ∩ span(b) via the kernel of [Ra | -Rb]
  ZMat ra = a.ray_matrix(), rb = b.ray_matrix();
  QMat big(a.rank, ra.cols() + rb.cols());
  big.leftCols(ra.cols()) = to_q(ra);
  big.rightCols(rb.cols()) = -to_q(rb);
  QMat k = kernel(big);
  std::vector<ZVec> lin;
  for (Eigen::Index j = 0; j < k.cols(); ++j) {
    QVec u = k.col(j).head(ra.cols());
    QVec x = to_q(ra) * u;
    ZVec z = clear_denominators(x);
    if (!is_zero(z)) lin.push_back(primitive(z));
  }
  std::vector<ZVec> hs = facet_normals(a);
  for (const auto& f : facet_normals(b)) hs.push_back(f);
  DDResult dd = dual_description(lin, hs);
  if (!dd.lineality.empty()) throw Error("intersect_cones: unexpected lineality");
  return make_cone(a.rank, dd.rays);
}

} // namespace toricfact
