#include "toricfact/cobordism.hpp"

#include <map>
#include <set>

namespace toricfact {

std::vector<EITerm> build_E_I(const MonomialIdeal& ideal) {
  std::vector<EITerm> out;
  for (const auto& g : ideal.gens) out.push_back({g, 1, 0, 1, 0}); // I U0 T0, weight 0
  out.push_back({ZVec::Zero(ideal.chart.rank), 0, 1, 1, 0});       // O U1 T0, weight 1
  for (const auto& g : ideal.gens) out.push_back({g, 1, 0, 0, 1}); // I U0 T1, weight 1
  out.push_back({ZVec::Zero(ideal.chart.rank), 0, 1, 0, 1});       // O U1 T1, weight 2
  return out;
}

std::vector<SliceTerm> degree_slice(const MonomialIdeal& ideal, int d) {
  if (d < 0) throw Error("degree_slice: negative degree");
  std::vector<SliceTerm> out;
  for (int k = 0; k <= 2 * d; ++k) {
    SliceTerm t;
    t.t1 = k;
    t.t0 = 2 * d - k;
    t.weight = k;
    int power = std::max(d - k, 0);
    if (power == 0) {
      t.coeff_gens.push_back(ZVec::Zero(ideal.chart.rank));
    } else {
      t.coeff_gens = veronese(ideal, power).gens;
    }
    out.push_back(t);
  }
  return out;
}

int CobordismFan::upper_index() const {
  for (size_t i = 0; i < sigma_o.max_cones().size(); ++i)
    if (contains(sigma_o.max_cones()[i], cocharacter, Strictness::Boundary))
      return static_cast<int>(i);
  throw Error("cobordism: upper cone not found");
}

int CobordismFan::lower_index() const {
  ZVec mu = -cocharacter;
  for (size_t i = 0; i < sigma_o.max_cones().size(); ++i)
    if (contains(sigma_o.max_cones()[i], mu, Strictness::Boundary)) return static_cast<int>(i);
  throw Error("cobordism: lower cone not found");
}

namespace {

ZVec lift(const ZVec& v, const Int& last) {
  ZVec w(v.size() + 1);
  w.head(v.size()) = v;
  w(v.size()) = last;
  return w;
}

// ambient functional of a full-dimensional chart functional
ZVec ambient_functional(const ZMat& embed, const ZVec& chart_fn) {
  return inverse_unimodular(embed).transpose() * chart_fn;
}

// the subdivision state of a fan refinement, chart by chart of the base
SubdivState fan_state(const FanAsComplex& base, const Fan& fine) {
  SubdivState st(base.complex);
  for (size_t i = 0; i < base.complex.cones().size(); ++i) {
    const Cone& abstract = base.complex.cones()[i];
    if (abstract.rays.empty()) continue;
    const ZMat& e = base.embed[i];
    std::vector<ZVec> conc_rays;
    for (const auto& r : abstract.rays) conc_rays.push_back(primitive(ZVec(e * r)));
    Cone embedded = make_cone(fine.ambient(), conc_rays);
    std::vector<Cone> pieces;
    QMat eq = to_q(e);
    for (const auto& p : fine.max_cones()) {
      Cone inter = intersect_cones(p, embedded);
      if (inter.dim() != embedded.dim()) continue;
      std::vector<ZVec> back;
      for (const auto& r : inter.rays) {
        auto x = solve(eq, to_q(r));
        if (!x) throw Error("fan_state: ray outside chart span");
        back.push_back(clear_denominators(*x));
      }
      pieces.push_back(make_cone(abstract.rank, back));
    }
    st.chart(i) = Fan(abstract.rank, pieces);
  }
  st.validate();
  return st;
}

// transport per-maximal-cone ambient functionals of `fine` to chart data
std::vector<std::vector<ZVec>> to_chart_fn(const FanAsComplex& base, const SubdivState& st,
                                           const Fan& fine, const std::vector<ZVec>& amb) {
  std::vector<std::vector<ZVec>> out(base.complex.cones().size());
  for (size_t i = 0; i < base.complex.cones().size(); ++i) {
    const ZMat& e = base.embed[i];
    for (const auto& piece : st.chart(i).max_cones()) {
      // ambient interior point of the piece
      ZVec z = ZVec::Zero(base.complex.cones()[i].rank);
      for (const auto& r : piece.rays) z += r;
      ZVec conc = e * z;
      int host = -1;
      for (size_t j = 0; j < fine.max_cones().size(); ++j)
        if (contains(fine.max_cones()[j], conc, Strictness::Boundary)) {
          host = static_cast<int>(j);
          break;
        }
      if (host < 0) throw Error("to_chart_fn: piece outside the fan");
      out[i].push_back(e.transpose() * amb[static_cast<size_t>(host)]);
    }
  }
  return out;
}

} // namespace

CobordismFan build_cobordism(const MonomialIdeal& ideal, bool veronese_double) {
  if (ideal.is_unit()) throw Error("build_cobordism: trivial blowup (unit ideal)");
  CobordismFan b;
  b.base = ideal.chart;
  b.ideal = ideal;
  const Eigen::Index n = ideal.chart.rank;
  b.cocharacter = ZVec::Zero(n + 1);
  b.cocharacter(n) = 1;

  // Sigma_O: the P^1-fan over the base chart
  std::vector<ZVec> up_rays, low_rays;
  for (const auto& r : ideal.chart.rays) {
    up_rays.push_back(lift(r, 0));
    low_rays.push_back(lift(r, 0));
  }
  up_rays.push_back(b.cocharacter);
  low_rays.push_back(-b.cocharacter);
  b.sigma_o = Fan(n + 1, {make_cone(n + 1, up_rays), make_cone(n + 1, low_rays)}, true);

  // order function of I (x) O + I_{0}: min(f_I, s) upstairs, 0 downstairs
  FanPL fb;
  fb.fn.resize(2);
  int up = b.upper_index(), low = b.lower_index();
  for (const auto& g : ideal.gens) fb.fn[static_cast<size_t>(up)].push_back(lift(g, 0));
  fb.fn[static_cast<size_t>(up)].push_back(b.cocharacter);
  fb.fn[static_cast<size_t>(low)].push_back(ZVec::Zero(n + 1));

  b.intermediate = regions_of_linearity(b.sigma_o, fb);
  b.total = desingularize(b.intermediate, &b.desing);
  if (!b.total.is_smooth()) throw Error("build_cobordism: resolution failed");

  // composite certificate of total over sigma_o, chart by chart
  FanAsComplex base = fan_to_complex(b.sigma_o);
  std::vector<BlowupStage> chain;
  {
    BlowupStage st;
    st.cumulative = fan_state(base, b.intermediate);
    std::vector<ZVec> amb = restrict_pl(b.sigma_o, fb, b.intermediate);
    st.stage_fn = to_chart_fn(base, st.cumulative, b.intermediate, amb);
    chain.push_back(st);
  }
  {
    Fan cur = b.intermediate;
    for (const auto& ds : b.desing) {
      Fan next = cur.star_subdivide(ds.center);
      std::vector<ZVec> amb = exceptional_certificate(next, cur.rays(), {ds.center});
      BlowupStage st;
      st.cumulative = fan_state(base, next);
      st.stage_fn = to_chart_fn(base, st.cumulative, next, amb);
      chain.push_back(st);
      cur = next;
    }
    if (!(cur == b.total)) throw Error("build_cobordism: desingularization replay mismatch");
  }
  CoherenceCertificate ftot = compose_blowups(base.complex, chain);

  // ambient functionals per maximal cone of the total fan
  const SubdivState& finst = chain.back().cumulative;
  std::vector<ZVec> ftot_amb(b.total.max_cones().size());
  {
    std::vector<bool> seen(b.total.max_cones().size(), false);
    for (size_t i = 0; i < base.complex.cones().size(); ++i) {
      if (base.complex.cones()[i].dim() != n + 1) continue; // full charts only
      const ZMat& e = base.embed[i];
      for (size_t p = 0; p < finst.chart(i).max_cones().size(); ++p) {
        std::vector<ZVec> conc;
        for (const auto& r : finst.chart(i).max_cones()[p].rays)
          conc.push_back(primitive(ZVec(e * r)));
        Cone cc = make_cone(n + 1, conc);
        for (size_t j = 0; j < b.total.max_cones().size(); ++j)
          if (b.total.max_cones()[j] == cc) {
            ftot_amb[j] = ambient_functional(e, ftot.fn[i][p]);
            seen[j] = true;
          }
      }
    }
    for (bool s : seen)
      if (!s) throw Error("build_cobordism: certificate transport incomplete");
  }

  // twist along -u: minimal positive multiple making the data globally
  // strictly convex (equivalently: every functional a global section)
  ZVec psi_low = ZVec::Zero(n + 1);
  psi_low(n) = 1; // s, applies on the lower half only
  auto twisted = [&](const Int& dd) {
    std::vector<ZVec> h(b.total.max_cones().size());
    ZVec mu = -b.cocharacter;
    for (size_t j = 0; j < b.total.max_cones().size(); ++j) {
      h[j] = ftot_amb[j];
      if (contains(b.total.max_cones()[j], mu, Strictness::Boundary)) h[j] += dd * psi_low;
    }
    return h;
  };
  auto globally_strict = [&](const std::vector<ZVec>& h) {
    for (size_t p = 0; p < b.total.max_cones().size(); ++p)
      for (size_t q = 0; q < b.total.max_cones().size(); ++q) {
        if (p == q) continue;
        for (const auto& r : b.total.max_cones()[q].rays) {
          Int gap = (h[p] - h[q]).dot(r);
          bool in_p = contains(b.total.max_cones()[p], r, Strictness::Boundary);
          if (gap < 0 || (!in_p && gap == 0)) return false;
        }
      }
    return true;
  };
  Int dd = 1;
  for (; dd <= 64; dd += 1) {
    if (globally_strict(twisted(dd))) break;
  }
  if (dd > 64) throw Error("build_cobordism: twist search exceeded bound");
  b.twist = dd;
  b.h = twisted(dd);
  b.veronese = veronese_double ? 2 : 1;
  if (veronese_double)
    for (auto& l : b.h) l *= Int(2);

  // spread check and the weight normalization guards
  Int amin, amax;
  bool first = true;
  for (const auto& l : b.h) {
    Int w = l.dot(b.cocharacter);
    if (first || w < amin) amin = w;
    if (first || w > amax) amax = w;
    first = false;
  }
  if (amin != 0) throw Error("build_cobordism: weight normalization failed (a_min != 0)");
  if (amax % 2 != 0 && veronese_double)
    throw Error("build_cobordism: a_max is odd after doubling");
  b.d = amax / 2;
  if (amax == 0) throw Error("build_cobordism: degenerate weight range (spread check)");
  return b;
}

WeightTable weight_intervals(const CobordismFan& b) {
  WeightTable wt;
  wt.cones = b.total.all_cones();
  wt.intervals.resize(wt.cones.size());
  bool first_global = true;
  for (size_t c = 0; c < wt.cones.size(); ++c) {
    bool first = true;
    Int lo = 0, hi = 0;
    for (size_t j = 0; j < b.total.max_cones().size(); ++j) {
      bool inside = true;
      for (const auto& r : wt.cones[c].rays)
        if (!contains(b.total.max_cones()[j], r, Strictness::Boundary)) {
          inside = false;
          break;
        }
      if (!inside) continue;
      Int w = b.h[j].dot(b.cocharacter);
      if (first || w < lo) lo = w;
      if (first || w > hi) hi = w;
      first = false;
    }
    if (first) throw Error("weight_intervals: cone not contained in any maximal cone");
    wt.intervals[c] = {lo, hi};
    if (first_global || lo < wt.a_min) wt.a_min = lo;
    if (first_global || hi > wt.a_max) wt.a_max = hi;
    first_global = false;
  }
  return wt;
}

WallChamberData walls(const CobordismFan& b, const WeightTable& wt) {
  std::set<Int, std::less<Int>> vals;
  for (size_t c = 0; c < wt.cones.size(); ++c)
    if (wt.intervals[c].singleton()) vals.insert(wt.intervals[c].wmin);
  WallChamberData out;
  for (const auto& v : vals) out.walls.push_back(v);
  // Assumption-style separation: consecutive walls differ by more than 1
  if (b.veronese == 2)
    for (size_t i = 0; i + 1 < out.walls.size(); ++i)
      if (out.walls[i] + 1 >= out.walls[i + 1])
        throw Error("walls: separation assumption violated after doubling");
  return out;
}

std::vector<Cone> semistable_subfan(const WeightTable& wt, const Int& a) {
  std::vector<Cone> out;
  for (size_t c = 0; c < wt.cones.size(); ++c)
    if (wt.intervals[c].wmin <= a && a <= wt.intervals[c].wmax) out.push_back(wt.cones[c]);
  return out;
}

namespace {

ZMat projection_matrix(Eigen::Index n) {
  ZMat pi = ZMat::Zero(n, n + 1);
  for (Eigen::Index i = 0; i < n; ++i) pi(i, i) = 1;
  return pi;
}

QuotientResult quotient_with_certificate(const CobordismFan& b, const Fan& qfan) {
  QuotientResult out;
  out.fan = qfan;
  FanAsComplex fc = fan_to_complex(fan_of_cone(b.base));
  out.base_complex = fc.complex;
  out.subdivision = fan_state(fc, qfan);
  auto cert = certify_coherence(out.subdivision);
  if (!cert) throw Error("git_quotient: quotient is not projective over the base");
  out.cert = *cert;
  return out;
}

} // namespace

QuotientResult git_quotient(const CobordismFan& b, const Int& a) {
  WeightTable wt = weight_intervals(b);
  WallChamberData wc = walls(b, wt);
  for (const auto& w : wc.walls)
    if (w == a) throw Error("git_quotient: linearization value lies on a wall");
  if (a < wt.a_min || a > wt.a_max)
    throw Error("git_quotient: linearization value outside the weight range");

  const Eigen::Index n = b.base.rank;
  ZMat pi = projection_matrix(n);
  std::vector<Cone> images;
  for (const auto& c : semistable_subfan(wt, a)) {
    ZMat rays = c.ray_matrix();
    ZMat proj = pi * rays;
    if (rank(proj) != c.dim())
      throw Error("git_quotient: not a geometric chamber (projection collapses a cone)");
    std::vector<ZVec> pr;
    for (Eigen::Index j = 0; j < proj.cols(); ++j) pr.push_back(primitive(ZVec(proj.col(j))));
    images.push_back(make_cone(n, pr));
  }
  Fan qfan(n, images, true);
  return quotient_with_certificate(b, qfan);
}

Fan wall_quotient(const CobordismFan& b, const Int& a) {
  WeightTable wt = weight_intervals(b);
  const Eigen::Index n = b.base.rank;
  ZMat pi = projection_matrix(n);
  std::vector<Cone> images;
  for (const auto& c : semistable_subfan(wt, a)) {
    std::vector<ZVec> pr;
    for (const auto& r : c.rays) {
      ZVec p = pi * r;
      if (!is_zero(p)) pr.push_back(primitive(p));
    }
    images.push_back(make_cone(n, pr));
  }
  auto inside = [](const Cone& small, const Cone& big) {
    for (const auto& r : small.rays)
      if (!contains(big, r, Strictness::Boundary)) return false;
    return true;
  };
  // absorb images swallowed by a collapse into the containing images
  std::vector<Cone> maximal;
  for (size_t i = 0; i < images.size(); ++i) {
    bool dominated = false;
    for (size_t j = 0; j < images.size() && !dominated; ++j) {
      if (i == j) continue;
      if (inside(images[i], images[j]) && !(images[i] == images[j] && i < j)) dominated = true;
    }
    if (!dominated) maximal.push_back(images[i]);
  }
  Fan qfan(n, maximal);
  qfan.validate_fan();
  return qfan;
}

ZigzagResult zigzag(const CobordismFan& b) {
  WeightTable wt = weight_intervals(b);
  WallChamberData wc = walls(b, wt);
  ZigzagResult out;
  out.wall_values = wc.walls;
  for (const auto& a : wc.walls) out.wall_quotients.push_back(wall_quotient(b, a));
  for (size_t i = 0; i + 1 < wc.walls.size(); ++i) {
    QuotientResult lo = git_quotient(b, Int(wc.walls[i] + 1));
    QuotientResult hi = git_quotient(b, Int(wc.walls[i + 1] - 1));
    if (!(lo.fan == hi.fan))
      throw Error("zigzag: chamber quotient is not constant across the chamber");
    out.chamber_quotients.push_back(lo.fan);
  }
  // legs: chamber quotients refine the neighbouring wall quotients
  for (size_t i = 0; i < wc.walls.size(); ++i) {
    auto add_leg = [&](const Fan& from) {
      ZigzagLeg leg;
      leg.from = from;
      leg.to = out.wall_quotients[i];
      FanAsComplex fc = fan_to_complex(leg.to);
      leg.subdivision = fan_state(fc, leg.from);
      auto cert = certify_coherence(leg.subdivision);
      if (!cert) throw Error("zigzag: leg is not projective");
      leg.cert = *cert;
      out.legs.push_back(leg);
      out.leg_wall.push_back(static_cast<int>(i));
    };
    if (i > 0) add_leg(out.chamber_quotients[i - 1]);
    if (i + 1 < wc.walls.size()) add_leg(out.chamber_quotients[i]);
  }
  return out;
}

std::vector<Cone> cobordism_u_faces(const CobordismFan& b) {
  // the order function vanishes on a face exactly when a single generator
  // pairs to zero with the whole face
  std::vector<Cone> out;
  for (const auto& f : faces(b.base)) {
    bool zero = false;
    for (const auto& g : b.ideal.gens) {
      bool vanishes = true;
      for (const auto& r : f.rays)
        if (g.dot(r) != 0) {
          vanishes = false;
          break;
        }
      if (vanishes) {
        zero = true;
        break;
      }
    }
    if (zero) out.push_back(f);
  }
  return out;
}

bool zigzag_respects_u(const CobordismFan& b, const ZigzagResult& z) {
  std::vector<Cone> ufaces = cobordism_u_faces(b);
  auto trivial_over = [&](const Fan& f) {
    for (const auto& uf : ufaces) {
      if (uf.rays.empty()) continue;
      // the restriction of f to uf must be the trivial subdivision of uf
      std::vector<Cone> pieces;
      for (const auto& m : f.max_cones()) {
        Cone inter = intersect_cones(m, uf);
        if (inter.dim() == uf.dim()) pieces.push_back(inter);
      }
      for (const auto& p : pieces)
        if (!(p == uf)) return false;
    }
    return true;
  };
  for (const auto& f : z.wall_quotients)
    if (!trivial_over(f)) return false;
  for (const auto& f : z.chamber_quotients)
    if (!trivial_over(f)) return false;
  return true;
}

} // namespace toricfact
