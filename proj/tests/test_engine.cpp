#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "toricfact/verify.hpp"

using namespace toricfact;

namespace {

Cone std_cone(int d) {
  std::vector<ZVec> rays;
  for (int i = 0; i < d; ++i) {
    ZVec e = ZVec::Zero(d);
    e(i) = 1;
    rays.push_back(e);
  }
  return make_cone(d, rays);
}

MarkedComplex affine_marked(int d) {
  MarkedComplex m;
  m.cx = fan_to_complex(fan_of_cone(std_cone(d))).complex;
  return m;
}

PLDatum datum_on(const GenComplex& cx, const std::vector<ZVec>& fns) {
  // pulls the top-chart functionals back to every face along the maps
  int top = -1;
  for (size_t i = 0; i < cx.cones().size(); ++i)
    if (cx.cones()[i].dim() == cx.dim()) top = static_cast<int>(i);
  PLDatum f;
  f.fn.resize(cx.cones().size());
  for (size_t i = 0; i < cx.cones().size(); ++i) {
    auto ms = cx.maps_between(static_cast<int>(i), top);
    REQUIRE(!ms.empty());
    const ZMat& m = cx.maps()[static_cast<size_t>(ms[0])].mat;
    std::set<std::string> seen;
    for (const auto& l : fns) {
      ZVec p = m.transpose() * l;
      if (seen.insert(to_string(p)).second) f.fn[i].push_back(p);
    }
    sort_rays(f.fn[i]);
  }
  return f;
}

} // namespace

TEST_CASE("factor_2d: single star is one step") {
  MarkedComplex base = affine_marked(2);
  PLDatum f = datum_on(base.cx, {zvec({1, 0}), zvec({0, 1})});
  FactorizationCertificate c = factor_2d(base, f);
  CHECK(c.steps.size() == 1);
  CHECK(c.strong);
  VerificationReport rep = check_weak_factorization(c);
  INFO(rep.first_failure());
  CHECK(rep.pass);
}

TEST_CASE("factor_2d: three rays inserted in the documented order") {
  MarkedComplex base = affine_marked(2);
  // strictly convex on the fan with rays (2,1), (1,1), (1,2): values 0, 5, 4, 5, 0
  PLDatum f = datum_on(base.cx, {zvec({0, 5}), zvec({1, 3}), zvec({3, 1}), zvec({5, 0})});
  Subdivision s = subdivision_from_pl(base.cx, f);
  size_t top = 0;
  for (size_t i = 0; i < base.cx.cones().size(); ++i)
    if (base.cx.cones()[i].dim() == 2) top = i;
  std::set<std::string> rays;
  for (const auto& r : s.state.chart(top).rays()) rays.insert(to_string(r));
  REQUIRE(rays.count("(2,1)"));
  REQUIRE(rays.count("(1,1)"));
  REQUIRE(rays.count("(1,2)"));
  FactorizationCertificate c = factor_2d(base, f);
  REQUIRE(c.steps.size() == 3);
  auto center_point = [&](const FactorizationStep& st) {
    for (const auto& per : st.centers.per_chart)
      for (const auto& ctr : per) return to_string(ctr.point);
    return std::string();
  };
  CHECK(center_point(c.steps[0]) == "(1,1)");
  CHECK(center_point(c.steps[1]) == "(2,1)");
  CHECK(center_point(c.steps[2]) == "(1,2)");
  VerificationReport rep = check_weak_factorization(c);
  INFO(rep.first_failure());
  CHECK(rep.pass);

  // the BFS oracle confirms minimal length three
  auto oracle = oracle_factor_2d(std_cone(2), s.state.chart(top));
  REQUIRE(oracle.has_value());
  CHECK(oracle->size() == 3);
  CHECK(lex_compare((*oracle)[0], zvec({1, 1})) == 0);
}

TEST_CASE("factor_2d: trivial subdivision gives the empty list") {
  MarkedComplex base = affine_marked(2);
  PLDatum f = datum_on(base.cx, {zvec({1, 1})});
  FactorizationCertificate c = factor_2d(base, f);
  CHECK(c.steps.empty());
  CHECK(check_weak_factorization(c).pass);
}

TEST_CASE("weak_factorization on ((x,y), A^2)") {
  MarkedComplex base = affine_marked(2);
  MonomialIdeal i = make_ideal(std_cone(2), {zvec({1, 0}), zvec({0, 1})});
  FactorizationCertificate c = weak_factorization(base, i);
  CHECK(!c.steps.empty());
  bool has_forward = false, has_inverse = false;
  for (const auto& st : c.steps) (st.forward ? has_forward : has_inverse) = true;
  CHECK(has_forward);
  CHECK(has_inverse);
  VerificationReport rep = check_weak_factorization(c);
  INFO(rep.first_failure());
  CHECK(rep.pass);
  // the composite is the star subdivision at (1,1)
  size_t top = 0;
  for (size_t i2 = 0; i2 < base.cx.cones().size(); ++i2)
    if (base.cx.cones()[i2].dim() == 2) top = i2;
  Fan star = fan_of_cone(std_cone(2)).star_subdivide(zvec({1, 1}));
  CHECK(c.source.chart(top) == star);
}

TEST_CASE("weak factorization is invariant under the Veronese square") {
  MarkedComplex base = affine_marked(2);
  MonomialIdeal i = make_ideal(std_cone(2), {zvec({1, 0}), zvec({0, 1})});
  MonomialIdeal i2 = veronese(i, 2);
  FactorizationCertificate a = weak_factorization(base, i);
  FactorizationCertificate b = weak_factorization(base, i2);
  REQUIRE(a.steps.size() == b.steps.size());
  for (size_t k = 0; k < a.steps.size(); ++k) {
    CHECK(a.steps[k].forward == b.steps[k].forward);
    CHECK(a.steps[k].result == b.steps[k].result);
  }
}

TEST_CASE("unit ideal gives the empty factorization") {
  MarkedComplex base = affine_marked(2);
  MonomialIdeal unit = make_ideal(std_cone(2), {zvec({0, 0})});
  FactorizationCertificate c = weak_factorization(base, unit);
  CHECK(c.steps.empty());
  CHECK(c.source.is_trivial());
  CHECK(check_weak_factorization(c).pass);
}

TEST_CASE("dimension 3 hits the extension point") {
  MarkedComplex base = affine_marked(3);
  MonomialIdeal i = make_ideal(std_cone(3), {zvec({1, 0, 0}), zvec({0, 1, 0}), zvec({0, 0, 1})});
  CHECK_THROWS_AS(weak_factorization(base, i), NotImplementedError);
}

TEST_CASE("barycentric_reduction on the trivial subdivision") {
  MarkedComplex base = affine_marked(2);
  PLDatum f = datum_on(base.cx, {zvec({0, 0})});
  base.u_cones = u_subcomplex(base.cx, f, {});
  SubdivState triv(base.cx);
  BarycentricReduction br = barycentric_reduction(base, triv, 256);
  // everything is in U, so nothing is subdivided at all
  CHECK(br.front_end == br.delta_prime);
  CHECK(br.front.empty());
  CHECK(br.back.empty());
}

TEST_CASE("barycentric_reduction of the 2d star") {
  MarkedComplex base = affine_marked(2);
  PLDatum f = datum_on(base.cx, {zvec({1, 0}), zvec({0, 1})});
  base.u_cones = u_subcomplex(base.cx, f, {});
  Subdivision s = subdivision_from_pl(base.cx, f);
  BarycentricReduction br = barycentric_reduction(base, s.state, 256);
  CHECK(br.front_end.refines(br.delta_prime));
  CHECK(br.delta_prime_fan.fan.is_smooth());
  // the residual is coherent relative to delta prime
  CHECK(certify_relative(br.delta_prime, br.front_end).has_value());
  // replaying front from the source reaches front_end
  SubdivState cur = s.state;
  for (const auto& st : br.front) {
    star_round(cur, st.centers);
    CHECK(cur == st.result);
  }
  CHECK(cur == br.front_end);
}

TEST_CASE("pi_desingularize contract") {
  MarkedComplex base = affine_marked(2);
  SubdivState triv(base.cx);
  CHECK(pi_desingularize(triv, triv).empty());
  // a non-identity 3d residual without a plugin is rejected
  MarkedComplex b3 = affine_marked(3);
  SubdivState t3(b3.cx);
  SubdivState fine = t3;
  size_t top = 0;
  for (size_t i = 0; i < b3.cx.cones().size(); ++i)
    if (b3.cx.cones()[i].dim() == 3) top = i;
  fine.chart(top) = fine.chart(top).star_subdivide(zvec({1, 1, 1}));
  CHECK_THROWS_AS(pi_desingularize(t3, fine), NotImplementedError);
  // a garbage plugin is rejected by the gate
  PiDesingPlugin bad = [](const SubdivState& c, const SubdivState& f2) {
    (void)c;
    FactorizationStep st;
    st.forward = true;
    st.result = f2;
    st.centers.per_chart.resize(f2.base().cones().size());
    return std::vector<FactorizationStep>{st};
  };
  CHECK_THROWS_AS(pi_desingularize(t3, fine, bad), Error);
}

TEST_CASE("functoriality under the fold of two copies") {
  MarkedComplex base = affine_marked(2);
  PLDatum f = datum_on(base.cx, {zvec({1, 0}), zvec({0, 1})});
  FactorizationCertificate target = functorial_factorization(base, f);
  {
    VerificationReport rep = check_weak_factorization(target);
    INFO(rep.first_failure());
    REQUIRE(rep.pass);
  }

  // two disjoint copies with the folded datum
  const int n = static_cast<int>(base.cx.cones().size());
  std::vector<Cone> cones;
  std::vector<FaceMapRec> maps;
  for (int copy = 0; copy < 2; ++copy)
    for (const auto& c : base.cx.cones()) cones.push_back(c);
  for (const auto& m : base.cx.maps())
    for (int copy = 0; copy < 2; ++copy) maps.push_back({m.src + copy * n, m.dst + copy * n, m.mat});
  MarkedComplex dbl;
  dbl.cx = GenComplex::build(cones, maps, false);
  PLDatum f2;
  f2.fn.resize(dbl.cx.cones().size());
  for (size_t i = 0; i < dbl.cx.cones().size(); ++i) f2.fn[i] = f.fn[i % static_cast<size_t>(n)];
  FactorizationCertificate source = functorial_factorization(dbl, f2);
  {
    VerificationReport rep = check_weak_factorization(source);
    INFO(rep.first_failure());
    REQUIRE(rep.pass);
  }

  ComplexMorphism fold;
  for (size_t i = 0; i < dbl.cx.cones().size(); ++i) {
    fold.cone_to.push_back(static_cast<int>(i % static_cast<size_t>(n)));
    fold.mats.push_back(zident(dbl.cx.cones()[i].rank));
  }
  REQUIRE(morphism_valid(dbl.cx, base.cx, fold, true));
  REQUIRE(morphism_surjective(dbl.cx, base.cx, fold));
  std::string witness;
  bool ok = check_functoriality(dbl.cx, base.cx, fold, target, source, &witness);
  INFO(witness);
  CHECK(ok);
}

TEST_CASE("functoriality under a relabeling isomorphism") {
  MarkedComplex base = affine_marked(2);
  // order function of (y^3, xy, x^2): smooth subdivision with rays (2,1), (1,1)
  PLDatum f = datum_on(base.cx, {zvec({0, 3}), zvec({1, 1}), zvec({2, 0})});
  FactorizationCertificate target = functorial_factorization(base, f);
  REQUIRE(check_weak_factorization(target).pass);

  // same complex presented with swapped coordinates
  ZMat swap = zmat(2, 2, {0, 1, 1, 0});
  std::vector<Cone> cones;
  for (const auto& c : base.cx.cones()) {
    if (c.rank == 2) {
      std::vector<ZVec> rays;
      for (const auto& r : c.rays) rays.push_back(swap * r);
      cones.push_back(make_cone(2, rays));
    } else {
      cones.push_back(c);
    }
  }
  std::vector<FaceMapRec> maps;
  for (const auto& m : base.cx.maps()) {
    ZMat mm = m.mat;
    if (base.cx.cones()[static_cast<size_t>(m.dst)].rank == 2) mm = swap * mm;
    if (base.cx.cones()[static_cast<size_t>(m.src)].rank == 2)
      mm = mm * swap; // swap is its own inverse
    maps.push_back({m.src, m.dst, mm});
  }
  MarkedComplex other;
  other.cx = GenComplex::build(cones, maps, false);
  ComplexMorphism phi;
  for (size_t i = 0; i < other.cx.cones().size(); ++i) {
    phi.cone_to.push_back(static_cast<int>(i));
    phi.mats.push_back(other.cx.cones()[i].rank == 2 ? swap : zident(other.cx.cones()[i].rank));
  }
  REQUIRE(morphism_valid(other.cx, base.cx, phi, true));
  PLDatum fother = pullback_pl(other.cx, base.cx, phi, f);
  FactorizationCertificate source = functorial_factorization(other, fother);
  std::string witness;
  bool ok = check_functoriality(other.cx, base.cx, phi, target, source, &witness);
  INFO(witness);
  CHECK(ok);
}

TEST_CASE("multi-chart base with a U cone is factored away from U") {
  // two 2-cones glued along a ray; the datum is min(x, y) on one chart and
  // zero on the other
  Cone a = make_cone(2, {zvec({1, 0}), zvec({0, 1})});
  Cone b = make_cone(2, {zvec({-1, 0}), zvec({0, 1})});
  Fan fan(2, {a, b}, true);
  MarkedComplex base;
  base.cx = fan_to_complex(fan).complex;
  PLDatum f;
  f.fn.resize(base.cx.cones().size());
  FanAsComplex fc = fan_to_complex(fan);
  for (size_t i = 0; i < fc.complex.cones().size(); ++i) {
    const ZMat& e = fc.embed[i];
    // ambient datum: min(x, y) on the positive quadrant, 0 elsewhere
    ZVec g1 = zvec({1, 0}), g2 = zvec({0, 1});
    // restrict: the chart cone lies in the quadrant iff all embedded rays do
    bool inside = true;
    for (const auto& r : fc.complex.cones()[i].rays) {
      ZVec amb = e * r;
      if (!contains(a, amb, Strictness::Boundary)) inside = false;
    }
    if (inside && !fc.complex.cones()[i].rays.empty()) {
      std::set<std::string> seen;
      for (const auto& g : {g1, g2}) {
        ZVec l = e.transpose() * g;
        if (seen.insert(to_string(l)).second) f.fn[i].push_back(l);
      }
      sort_rays(f.fn[i]);
    } else {
      f.fn[i].push_back(ZVec::Zero(fc.complex.cones()[i].rank));
    }
  }
  REQUIRE(pl_compatible(base.cx, f));
  FactorizationCertificate c = weak_factorization(base, f);
  VerificationReport rep = check_weak_factorization(c);
  INFO(rep.first_failure());
  CHECK(rep.pass);
  // the U chart (the left cone) is never subdivided
  int left = -1;
  for (size_t i = 0; i < fc.complex.cones().size(); ++i) {
    if (fc.complex.cones()[i].dim() != 2) continue;
    ZVec amb = fc.embed[i] * barycenter(fc.complex.cones()[i]);
    if (!contains(a, amb, Strictness::Boundary)) left = static_cast<int>(i);
  }
  REQUIRE(left >= 0);
  for (const auto& st : c.steps) CHECK(st.result.trivial_on_chart(static_cast<size_t>(left)));
}

TEST_CASE("trivial input factors in any dimension") {
  MarkedComplex base = affine_marked(3);
  MonomialIdeal unit = make_ideal(std_cone(3), {zvec({0, 0, 0})});
  FactorizationCertificate c = weak_factorization(base, unit);
  CHECK(c.steps.empty());
  CHECK(check_weak_factorization(c).pass);
  // functorial path too
  AffinePL pl = pl_from_ideal(unit);
  FactorizationCertificate fc = functorial_factorization(base, pl.f);
  CHECK(fc.steps.empty());
  CHECK(check_weak_factorization(fc).pass);
}

TEST_CASE("functoriality along the quotient map onto the swap complex") {
  // the quadrant with the coordinate swap as a self face map; min(x, y) is
  // swap-compatible, so the whole factorization must be too
  // minimal presentation: one ray chart glued onto both axes of the quadrant
  Cone q = std_cone(2);
  Cone ray = std_cone(1);
  Cone zero;
  zero.rank = 0;
  ZMat swap = zmat(2, 2, {0, 1, 1, 0});
  MarkedComplex quot;
  quot.cx = GenComplex::build(
      {q, ray, zero},
      {{0, 0, swap},
       {1, 0, zmat(2, 1, {1, 0})},
       {1, 0, zmat(2, 1, {0, 1})},
       {2, 0, ZMat(2, 0)},
       {2, 1, ZMat(1, 0)}},
      false);
  PLDatum fq;
  fq.fn.resize(quot.cx.cones().size());
  for (size_t i = 0; i < quot.cx.cones().size(); ++i) {
    const Cone& c = quot.cx.cones()[i];
    if (c.dim() == 2) {
      fq.fn[i].push_back(zvec({0, 1}));
      fq.fn[i].push_back(zvec({1, 0}));
    } else {
      fq.fn[i].push_back(ZVec::Zero(c.rank));
    }
  }
  REQUIRE(pl_compatible(quot.cx, fq));
  FactorizationCertificate target = functorial_factorization(quot, fq);
  {
    VerificationReport rep = check_weak_factorization(target);
    INFO(rep.first_failure());
    REQUIRE(rep.pass);
  }

  // the honest quadrant covers the quotient
  MarkedComplex cover = affine_marked(2);
  ComplexMorphism phi;
  phi.cone_to.assign(cover.cx.cones().size(), -1);
  phi.mats.resize(cover.cx.cones().size());
  for (size_t i = 0; i < cover.cx.cones().size(); ++i) {
    const Cone& c = cover.cx.cones()[i];
    for (size_t j = 0; j < quot.cx.cones().size(); ++j)
      if (quot.cx.cones()[j].dim() == c.dim() && phi.cone_to[i] < 0) {
        phi.cone_to[i] = static_cast<int>(j);
        phi.mats[i] = zident(c.rank);
      }
  }
  REQUIRE(morphism_valid(cover.cx, quot.cx, phi, true));
  REQUIRE(morphism_surjective(cover.cx, quot.cx, phi));
  PLDatum fc = pullback_pl(cover.cx, quot.cx, phi, fq);
  FactorizationCertificate source = functorial_factorization(cover, fc);
  std::string witness;
  bool ok = check_functoriality(cover.cx, quot.cx, phi, target, source, &witness);
  INFO(witness);
  CHECK(ok);
}

TEST_CASE("deeper cobordism: (x^3, y) resolves and sweeps") {
  MonomialIdeal i = make_ideal(std_cone(2), {zvec({3, 0}), zvec({0, 1})});
  CobordismFan b = build_cobordism(i);
  CHECK(b.total.is_smooth());
  WeightTable wt = weight_intervals(b);
  CHECK(wt.a_min == 0);
  CHECK(wt.a_max == 2 * b.d);
  ZigzagResult z = zigzag(b);
  // bottom end: the resolved blowup of (x^3, y) has rays (1,1), (1,2), (1,3)
  Fan x1res = fan_of_cone(std_cone(2))
                  .star_subdivide(zvec({1, 3}))
                  .star_subdivide(zvec({1, 2}))
                  .star_subdivide(zvec({1, 1}));
  CHECK(z.wall_quotients.front() == x1res);
  CHECK(z.wall_quotients.back() == fan_of_cone(std_cone(2)));
  CHECK(zigzag_respects_u(b, z));
  // oracle agreement holds here too
  for (size_t c = 0; c < wt.cones.size(); ++c) {
    auto w = oracle_weights(b, wt.cones[c], 1, 0);
    REQUIRE(w.has_value());
    CHECK(w->front() == wt.intervals[c].wmin);
    CHECK(w->back() == wt.intervals[c].wmax);
  }
}
