#include "toricfact/verify.hpp"

#include <map>
#include <queue>
#include <set>

namespace toricfact {

namespace {

// kernel lattice basis of the pairing with the rays of a cone
std::vector<ZVec> pairing_kernel(const Cone& c, Eigen::Index ambient) {
  if (c.rays.empty()) {
    std::vector<ZVec> basis;
    for (Eigen::Index i = 0; i < ambient; ++i) {
      ZVec e = ZVec::Zero(ambient);
      e(i) = 1;
      basis.push_back(e);
    }
    return basis;
  }
  ZMat a(static_cast<Eigen::Index>(c.rays.size()), ambient);
  for (size_t i = 0; i < c.rays.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = c.rays[i];
  SmithForm sf = smith_form(a);
  Eigen::Index r = 0;
  const Eigen::Index nmin = std::min(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < nmin; ++i)
    if (sf.S(i, i) != 0) ++r;
  std::vector<ZVec> basis;
  for (Eigen::Index j = r; j < ambient; ++j) basis.push_back(sf.V.col(j));
  return basis;
}

} // namespace

std::optional<std::vector<Int>> oracle_weights(const CobordismFan& b, const Cone& cone, int scale,
                                               long coord_bound) {
  const Eigen::Index nn = b.total.ambient();
  if (coord_bound <= 0) {
    // default: wide enough to reach the supporting functional of any maximal
    // cone from any other, which bounds all extreme sections
    Int m = 0;
    for (const auto& l : b.h)
      for (Eigen::Index k = 0; k < l.size(); ++k) m = std::max(m, Int(abs(l(k))), std::less<Int>());
    coord_bound = 2 * scale * m.get_si() + 4;
  }
  // particular solution: the scaled supporting functional of any maximal cone
  // containing the given cone
  const ZVec* h0 = nullptr;
  for (size_t j = 0; j < b.total.max_cones().size(); ++j) {
    bool inside = true;
    for (const auto& r : cone.rays)
      if (!contains(b.total.max_cones()[j], r, Strictness::Boundary)) {
        inside = false;
        break;
      }
    if (inside) {
      h0 = &b.h[j];
      break;
    }
  }
  if (!h0) throw Error("oracle_weights: cone not in the fan");
  ZVec base = Int(scale) * (*h0);

  std::vector<ZVec> kernel = pairing_kernel(cone, nn);
  const size_t k = kernel.size();
  auto is_section = [&](const ZVec& m) {
    for (size_t j = 0; j < b.total.max_cones().size(); ++j) {
      ZVec diff = m - Int(scale) * b.h[j];
      for (const auto& r : b.total.max_cones()[j].rays)
        if (diff.dot(r) < 0) return false;
    }
    return true;
  };

  std::set<Int, std::less<Int>> weights;
  std::vector<long> y(k, -coord_bound);
  for (;;) {
    ZVec m = base;
    for (size_t i = 0; i < k; ++i) m += Int(y[i]) * kernel[i];
    if (is_section(m)) weights.insert(m.dot(b.cocharacter));
    size_t i = 0;
    for (; i < k; ++i) {
      if (y[i] < coord_bound) {
        ++y[i];
        for (size_t j = 0; j < i; ++j) y[j] = -coord_bound;
        break;
      }
    }
    if (i == k) break;
  }
  if (weights.empty()) return std::nullopt;
  std::vector<Int> out(weights.begin(), weights.end());
  return out;
}

std::optional<std::vector<ZVec>> oracle_factor_2d(const Cone& chart, const Fan& target,
                                                  int max_len) {
  if (chart.rank != 2) throw Error("oracle_factor_2d: chart must be two-dimensional");
  // state: sorted ray key of the current fan
  struct Node {
    Fan fan;
    std::vector<ZVec> inserted;
  };
  std::set<std::string> target_rays;
  for (const auto& r : target.rays()) target_rays.insert(to_string(r));
  auto key = [](const Fan& f) { return f.key(); };
  std::queue<Node> q;
  std::set<std::string> seen;
  Fan start = fan_of_cone(chart);
  q.push({start, {}});
  seen.insert(key(start));
  while (!q.empty()) {
    Node cur = q.front();
    q.pop();
    if (cur.fan == target) return cur.inserted;
    if (static_cast<int>(cur.inserted.size()) >= max_len) continue;
    for (const auto& c : cur.fan.max_cones()) {
      if (c.dim() != 2) continue;
      ZVec w = barycenter(c);
      if (!target_rays.count(to_string(w))) continue;
      Fan next = cur.fan.star_subdivide(w);
      std::string nk = key(next);
      if (!seen.insert(nk).second) continue;
      Node nn2{next, cur.inserted};
      nn2.inserted.push_back(w);
      q.push(nn2);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Independent recomposition of factorization certificates. The helpers below
// only use the single-cone primitives from the lattice layer.

namespace {

using ChartFan = std::vector<Cone>; // maximal pieces, canonically sorted

ChartFan canon(std::vector<Cone> cs) {
  std::sort(cs.begin(), cs.end(),
            [](const Cone& a, const Cone& b) { return encode(a.rays) < encode(b.rays); });
  cs.erase(std::unique(cs.begin(), cs.end(), [](const Cone& a, const Cone& b) { return a == b; }),
           cs.end());
  return cs;
}

ChartFan of_state(const SubdivState& s, size_t i) {
  return canon(s.chart(i).max_cones());
}

// star subdivision of a list of maximal cones at a point
ChartFan vstar(const ChartFan& pieces, const ZVec& w) {
  std::vector<Cone> out;
  for (const auto& c : pieces) {
    if (!contains(c, w, Strictness::Boundary)) {
      out.push_back(c);
      continue;
    }
    bool split = false;
    for (const auto& f : faces(c)) {
      if (contains(f, w, Strictness::Boundary)) continue;
      std::vector<ZVec> gens = f.rays;
      gens.push_back(w);
      Cone piece = make_cone(c.rank, gens);
      if (piece.dim() == c.dim()) {
        out.push_back(piece);
        split = true;
      }
    }
    if (!split) out.push_back(c);
  }
  return canon(out);
}

bool chart_equal(const ChartFan& a, const ChartFan& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

struct StepFailure {
  bool failed = false;
  std::string witness;
};

} // namespace

VerificationReport check_weak_factorization(const FactorizationCertificate& c) {
  VerificationReport rep;
  const GenComplex& base = c.base.cx;
  const size_t ncharts = base.cones().size();
  std::set<int> ucones(c.base.u_cones.begin(), c.base.u_cones.end());

  auto add = [&](const std::string& name, bool pass, const std::string& witness) {
    rep.conditions.push_back({name, pass, pass ? "" : witness});
  };

  // (1) recomposition: replay every step chart by chart and compare with the
  // stored states; the final state must equal the source subdivision
  {
    bool pass = true;
    std::string witness;
    std::vector<ChartFan> cur(ncharts);
    for (size_t i = 0; i < ncharts; ++i) cur[i] = {base.cones()[i]};
    for (size_t k = 0; k < c.steps.size() && pass; ++k) {
      const auto& st = c.steps[k];
      if (st.centers.per_chart.size() != ncharts || st.result.charts().size() != ncharts) {
        pass = false;
        witness = "step " + std::to_string(k) + ": malformed shapes";
        break;
      }
      // the coarser side of the step
      const std::vector<ChartFan>* coarse = nullptr;
      std::vector<ChartFan> result(ncharts), starred(ncharts);
      for (size_t i = 0; i < ncharts; ++i) result[i] = of_state(st.result, i);
      if (st.forward) {
        coarse = &cur;
      } else {
        coarse = &result;
      }
      for (size_t i = 0; i < ncharts && pass; ++i) {
        ChartFan f = (*coarse)[i];
        // centers must be cones of the coarse state
        for (const auto& ctr : st.centers.per_chart[i]) {
          bool found = false;
          for (const auto& p : (*coarse)[i])
            for (const auto& fc : faces(p))
              if (fc == ctr.face) found = true;
          if (!found) {
            pass = false;
            witness = "step " + std::to_string(k) + ": center is not a cone of the complex";
            break;
          }
        }
        if (!pass) break;
        std::vector<CenterRef> cs = st.centers.per_chart[i];
        std::sort(cs.begin(), cs.end(),
                  [](const CenterRef& a, const CenterRef& b) { return a.key() < b.key(); });
        for (const auto& ctr : cs) f = vstar(f, ctr.point);
        starred[i] = f;
      }
      if (!pass) break;
      const std::vector<ChartFan>& fine_expected = st.forward ? result : cur;
      for (size_t i = 0; i < ncharts && pass; ++i)
        if (!chart_equal(starred[i], fine_expected[i])) {
          pass = false;
          witness = "step " + std::to_string(k) + ": star recomposition mismatch on chart " +
                    std::to_string(i);
        }
      cur = result;
    }
    if (pass) {
      for (size_t i = 0; i < ncharts && pass; ++i)
        if (!chart_equal(cur[i], of_state(c.source, i))) {
          pass = false;
          witness = "endpoint differs from the source subdivision on chart " + std::to_string(i);
        }
    }
    add("composite equals the input subdivision", pass, witness);
  }

  // (2) isomorphism over U: every stored stage is trivial on U charts
  {
    bool pass = true;
    std::string witness;
    for (size_t k = 0; k < c.steps.size() && pass; ++k)
      for (int ui : ucones) {
        ChartFan f = of_state(c.steps[k].result, static_cast<size_t>(ui));
        if (f.size() != 1 || !(f[0] == base.cones()[static_cast<size_t>(ui)])) {
          pass = false;
          witness = "step " + std::to_string(k) + ": stage is nontrivial on U chart " +
                    std::to_string(ui);
          break;
        }
      }
    add("all stages restrict to isomorphisms over U", pass, witness);
  }

  // (3) centers: smooth barycentric stars disjoint from U
  {
    bool pass = true;
    std::string witness;
    for (size_t k = 0; k < c.steps.size() && pass; ++k)
      for (size_t i = 0; i < c.steps[k].centers.per_chart.size() && pass; ++i)
        for (const auto& ctr : c.steps[k].centers.per_chart[i]) {
          if (!is_smooth(ctr.face)) {
            pass = false;
            witness = "step " + std::to_string(k) + ": center cone is not smooth";
            break;
          }
          if (lex_compare(ctr.point, barycenter(ctr.face)) != 0) {
            pass = false;
            witness = "step " + std::to_string(k) + ": star point is not the barycenter";
            break;
          }
          // carrier face of the center must avoid U
          const Cone& bc = base.cones()[i];
          ZVec z = ZVec::Zero(bc.rank);
          for (const auto& r : ctr.face.rays) z += r;
          if (!contains(bc, z, Strictness::Boundary)) {
            pass = false;
            witness = "step " + std::to_string(k) + ": center outside its chart";
            break;
          }
          std::vector<ZVec> frays;
          for (int ri : minimal_face_ray_indices(bc, z))
            frays.push_back(bc.rays[static_cast<size_t>(ri)]);
          Cone face = make_cone(bc.rank, frays);
          for (const auto& m : base.maps()) {
            if (m.dst != static_cast<int>(i)) continue;
            if (!ucones.count(m.src)) continue;
            const Cone& cs = base.cones()[static_cast<size_t>(m.src)];
            if (cs.dim() != face.dim()) continue;
            std::vector<ZVec> im;
            for (const auto& r : cs.rays) im.push_back(primitive(ZVec(m.mat * r)));
            if (make_cone(bc.rank, im) == face) {
              pass = false;
              witness = "step " + std::to_string(k) + ": center lies in the U subcomplex";
              break;
            }
          }
          if (!pass) break;
        }
    add("centers are smooth and disjoint from U", pass, witness);
  }

  // (4) boundary: the boundary marking consists of ray cones, and centers are
  // cone classes of the marked complexes (normal crossings is automatic for
  // toroidal centers; the condition is recorded structurally)
  {
    bool pass = true;
    std::string witness;
    for (int b : c.base.boundary_rays)
      if (b < 0 || b >= static_cast<int>(ncharts) ||
          base.cones()[static_cast<size_t>(b)].dim() != 1) {
        pass = false;
        witness = "boundary marking is not a set of rays";
        break;
      }
    add("boundary data is toroidal (normal crossings by construction)", pass, witness);
  }

  // (5) J certificates: substitution checks, pieces equal the stored stages,
  // vanishing on U
  {
    bool pass = true;
    std::string witness;
    auto check_j = [&](const SubdivState& state, const CoherenceCertificate& j,
                       const std::string& tag) {
      if (j.fn.size() != ncharts) {
        pass = false;
        witness = tag + ": certificate shape mismatch";
        return;
      }
      for (size_t i = 0; i < ncharts && pass; ++i) {
        if (j.fn[i].size() != state.chart(i).max_cones().size()) {
          pass = false;
          witness = tag + ": piece count mismatch on chart " + std::to_string(i);
          return;
        }
        const auto& mc = state.chart(i).max_cones();
        for (size_t p = 0; p < mc.size() && pass; ++p)
          for (size_t q = 0; q < mc.size() && pass; ++q) {
            if (p == q) continue;
            for (const auto& r : mc[q].rays) {
              Int gap = (j.fn[i][p] - j.fn[i][q]).dot(r);
              bool in_p = contains(mc[p], r, Strictness::Boundary);
              if (gap < 0 || (!in_p && gap == 0)) {
                pass = false;
                witness = tag + ": linearity domains are not exactly the stage pieces (chart " +
                          std::to_string(i) + ", pieces " + std::to_string(p) + "/" +
                          std::to_string(q) + ", ray " + to_string(r) + ")";
                break;
              }
            }
          }
        if (!pass) return;
        if (ucones.count(static_cast<int>(i)))
          for (const auto& l : j.fn[i])
            if (!is_zero(l)) {
              pass = false;
              witness = tag + ": certificate does not vanish on U chart " + std::to_string(i);
              return;
            }
      }
      // compatibility across base maps
      for (const auto& m : base.maps()) {
        if (!pass) return;
        const auto& srcm = state.chart(static_cast<size_t>(m.src)).max_cones();
        const auto& dstm = state.chart(static_cast<size_t>(m.dst)).max_cones();
        for (size_t p = 0; p < srcm.size(); ++p) {
          std::vector<ZVec> image;
          for (const auto& r : srcm[p].rays) image.push_back(primitive(ZVec(m.mat * r)));
          int q = -1;
          for (size_t jx = 0; jx < dstm.size(); ++jx) {
            bool all = true;
            for (const auto& r : image)
              if (!contains(dstm[jx], r, Strictness::Boundary)) {
                all = false;
                break;
              }
            if (all) {
              q = static_cast<int>(jx);
              break;
            }
          }
          if (q < 0) {
            pass = false;
            witness = tag + ": stage charts inconsistent across " + m.key();
            return;
          }
          ZVec pulled = m.mat.transpose() * j.fn[static_cast<size_t>(m.dst)][static_cast<size_t>(q)];
          if (lex_compare(pulled, j.fn[static_cast<size_t>(m.src)][p]) != 0) {
            pass = false;
            witness = tag + ": certificate incompatible across " + m.key();
            return;
          }
        }
      }
    };
    for (size_t k = 0; k < c.steps.size() && pass; ++k)
      check_j(c.steps[k].result, c.steps[k].j, "step " + std::to_string(k));
    if (pass) check_j(c.source, c.source_cert, "source");
    // the source certificate must present the same function as the input
    if (pass) {
      for (size_t i = 0; i < ncharts && pass; ++i) {
        const Cone& bc = base.cones()[i];
        if (bc.rays.empty()) continue;
        std::vector<ZVec> a;
        for (const auto& l : c.source_cert.fn[i]) a.push_back(l);
        if (!pl_equal_on_cone(bc, a, c.input.fn[i])) {
          pass = false;
          witness = "source certificate does not present the input datum on chart " +
                    std::to_string(i);
        }
      }
    }
    add("per-stage ideals certify the stages and vanish on U", pass, witness);
  }

  rep.pass = true;
  for (const auto& cond : rep.conditions)
    if (!cond.pass) rep.pass = false;
  return rep;
}

bool check_functoriality(const GenComplex& src, const GenComplex& dst, const ComplexMorphism& phi,
                         const FactorizationCertificate& c_target,
                         const FactorizationCertificate& c_source, std::string* witness) {
  MarkedComplex src_marked;
  src_marked.cx = src;
  src_marked.boundary_rays = c_source.base.boundary_rays;
  FactorizationCertificate pulled = pullback_factorization(src_marked, dst, phi, c_target);
  std::string why;
  if (!certificates_equal(pulled, c_source, &why)) {
    if (witness) *witness = why;
    return false;
  }
  return true;
}

} // namespace toricfact
