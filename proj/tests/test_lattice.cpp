#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "toricfact/cone.hpp"
#include "toricfact/simplex.hpp"

#include <random>

using namespace toricfact;

namespace {

// Independent oracle for Smith invariants: gcd of k x k minors gives
// d1 * ... * dk; invariant factors follow by division.
Int minor_gcd(const ZMat& a, int k) {
  const Eigen::Index r = a.rows(), c = a.cols();
  std::vector<int> ri(static_cast<size_t>(k)), ci(static_cast<size_t>(k));
  Int g = 0;
  std::function<void(int, int)> pick_cols = [&](int pos, int start) {
    if (pos == k) {
      ZMat sub(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub(i, j) = a(ri[static_cast<size_t>(i)], ci[static_cast<size_t>(j)]);
      // exact determinant by cofactor expansion (k is tiny)
      std::function<Int(const ZMat&)> det = [&](const ZMat& m) -> Int {
        if (m.rows() == 1) return m(0, 0);
        Int s = 0;
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          ZMat sub2(m.rows() - 1, m.cols() - 1);
          for (Eigen::Index i = 1; i < m.rows(); ++i) {
            Eigen::Index cc = 0;
            for (Eigen::Index jj = 0; jj < m.cols(); ++jj) {
              if (jj == j) continue;
              sub2(i - 1, cc++) = m(i, jj);
            }
          }
          Int term = m(0, j) * det(sub2);
          if (j % 2) s -= term;
          else s += term;
        }
        return s;
      };
      Int d = abs(det(sub));
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      return;
    }
    for (int j = start; j < c; ++j) {
      ci[static_cast<size_t>(pos)] = j;
      pick_cols(pos + 1, j + 1);
    }
  };
  std::function<void(int, int)> pick_rows = [&](int pos, int start) {
    if (pos == k) {
      pick_cols(0, 0);
      return;
    }
    for (int i = start; i < r; ++i) {
      ri[static_cast<size_t>(pos)] = i;
      pick_rows(pos + 1, i + 1);
    }
  };
  pick_rows(0, 0);
  return g;
}

std::vector<Int> smith_oracle(const ZMat& a) {
  std::vector<Int> out;
  Int prev = 1;
  int kmax = static_cast<int>(std::min(a.rows(), a.cols()));
  for (int k = 1; k <= kmax; ++k) {
    Int g = minor_gcd(a, k);
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

ZMat random_zmat(std::mt19937& rng, int rows, int cols, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  ZMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = d(rng);
  return m;
}

} // namespace

TEST_CASE("hermite and smith forms reconstruct the input") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    int r = 1 + static_cast<int>(rng() % 4);
    int c = 1 + static_cast<int>(rng() % 4);
    ZMat a = random_zmat(rng, r, c, -6, 6);
    HermiteForm hf = hermite_form(a);
    CHECK(compare(hf.U * a, hf.H) == 0);
    CHECK(compare(hf.Uinv * hf.H, a) == 0);
    CHECK(compare(hf.U * hf.Uinv, zident(r)) == 0);
    SmithForm sf = smith_form(a);
    CHECK(compare(sf.U * a * sf.V, sf.S) == 0);
    CHECK(compare(sf.Uinv * sf.S * sf.Vinv, a) == 0);
    CHECK(compare(sf.V * sf.Vinv, zident(c)) == 0);
    auto inv = smith_invariants(a);
    auto want = smith_oracle(a);
    REQUIRE(inv.size() == want.size());
    for (size_t i = 0; i < inv.size(); ++i) CHECK(inv[i] == want[i]);
    for (size_t i = 0; i + 1 < inv.size(); ++i) CHECK(inv[i + 1] % inv[i] == 0);
  }
}

TEST_CASE("hermite/smith canonical examples") {
  ZMat id2 = zident(2);
  HermiteForm hf = hermite_form(id2);
  CHECK(compare(hf.H, id2) == 0);
  CHECK(compare(hf.U, id2) == 0);

  ZMat d23 = zmat(2, 2, {2, 0, 0, 3});
  auto inv = smith_invariants(d23);
  REQUIRE(inv.size() == 2);
  CHECK(inv[0] == 1);
  CHECK(inv[1] == 6);

  ZMat a = zmat(2, 2, {1, 1, 0, 2});
  HermiteForm h2 = hermite_form(a);
  CHECK(compare(h2.H, a) == 0);
  auto inv2 = smith_invariants(a);
  REQUIRE(inv2.size() == 2);
  CHECK(inv2[0] == 1);
  CHECK(inv2[1] == 2);

  ZMat empty(0, 0);
  CHECK(hermite_form(empty).H.rows() == 0);
  CHECK(smith_invariants(empty).empty());
}

TEST_CASE("is_smooth") {
  Cone std2 = make_cone(2, {zvec({1, 0}), zvec({0, 1})});
  CHECK(is_smooth(std2));
  Cone sing = make_cone(2, {zvec({1, 0}), zvec({1, 2})});
  CHECK_FALSE(is_smooth(sing));
  Cone zero;
  zero.rank = 2;
  CHECK(is_smooth(zero));
  // cross-check against the Smith criterion on random smooth cones
  std::mt19937 rng(11);
  for (int t = 0; t < 30; ++t) {
    int n = 2 + static_cast<int>(rng() % 2);
    ZMat u = zident(n);
    // random unimodular via row ops
    for (int s = 0; s < 6; ++s) {
      int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % n);
      if (i != j) u.row(i) += Int(static_cast<long>(rng() % 3) - 1) * u.row(j);
    }
    std::vector<ZVec> rays;
    for (int j = 0; j < n; ++j) rays.push_back(u.col(j));
    Cone c = make_cone(n, rays);
    bool smith_all_one = true;
    for (const auto& d : smith_invariants(c.ray_matrix()))
      if (d != 1) smith_all_one = false;
    bool simplicial = c.is_simplicial();
    CHECK(is_smooth(c) == (smith_all_one && simplicial));
  }
}

TEST_CASE("faces") {
  Cone std2 = make_cone(2, {zvec({1, 0}), zvec({0, 1})});
  auto fs = faces(std2);
  REQUIRE(fs.size() == 4);
  CHECK(fs[0].rays.empty());
  CHECK(fs[1].rays.size() == 1);
  CHECK(fs[2].rays.size() == 1);
  CHECK(fs[3].rays.size() == 2);

  Cone ray = make_cone(2, {zvec({1, 0})});
  CHECK(faces(ray).size() == 2);

  Cone std3 = make_cone(3, {zvec({1, 0, 0}), zvec({0, 1, 0}), zvec({0, 0, 1})});
  CHECK(faces(std3).size() == 8);

  // face lattice closure
  for (const auto& f : faces(std3)) {
    auto sub = faces(f);
    for (const auto& g : sub) {
      bool found = false;
      for (const auto& h : faces(std3))
        if (h == g) found = true;
      CHECK(found);
    }
  }

  // non-simplicial: cone over a square in Z^3
  Cone square = make_cone(3, {zvec({1, 0, 1}), zvec({0, 1, 1}), zvec({-1, 0, 1}), zvec({0, -1, 1})});
  REQUIRE(square.rays.size() == 4);
  auto sf = faces(square);
  CHECK(sf.size() == 1 + 4 + 4 + 1); // 0, rays, walls, cone
  CHECK_FALSE(is_smooth(square));
}

TEST_CASE("barycenter") {
  Cone std2 = make_cone(2, {zvec({1, 0}), zvec({0, 1})});
  CHECK(lex_compare(barycenter(std2), zvec({1, 1})) == 0);
  Cone ray = make_cone(2, {zvec({1, 0})});
  CHECK(lex_compare(barycenter(ray), zvec({1, 0})) == 0);
  Cone c = make_cone(2, {zvec({1, 0}), zvec({1, 2})});
  CHECK(lex_compare(barycenter(c), zvec({1, 1})) == 0);
  Cone zero;
  zero.rank = 2;
  CHECK_THROWS_AS(barycenter(zero), Error);
  // barycenter lies in the relative interior
  Cone sing = make_cone(3, {zvec({1, 0, 0}), zvec({1, 2, 0}), zvec({0, 0, 1})});
  CHECK(contains(sing, barycenter(sing), Strictness::Interior));
}

TEST_CASE("contains") {
  Cone std2 = make_cone(2, {zvec({1, 0}), zvec({0, 1})});
  CHECK(contains(std2, zvec({2, 3}), Strictness::Interior));
  CHECK_FALSE(contains(std2, zvec({1, 0}), Strictness::Interior));
  CHECK(contains(std2, zvec({1, 0}), Strictness::Boundary));
  Cone c = make_cone(2, {zvec({1, 0}), zvec({1, 2})});
  CHECK(contains(c, zvec({1, 1}), Strictness::Interior));
  CHECK_FALSE(contains(c, zvec({0, 1}), Strictness::Boundary));
  CHECK_FALSE(contains(c, zvec({-1, 0}), Strictness::Boundary));
  Cone ray = make_cone(2, {zvec({1, 1})});
  CHECK(contains(ray, zvec({2, 2}), Strictness::Interior));
  CHECK_FALSE(contains(ray, zvec({2, 1}), Strictness::Boundary));
}

TEST_CASE("make_cone rejects lines and reduces generators") {
  CHECK_THROWS_AS(make_cone(2, {zvec({1, 0}), zvec({-1, 0})}), Error);
  Cone c = make_cone(2, {zvec({1, 0}), zvec({0, 1}), zvec({1, 1}), zvec({2, 0})});
  CHECK(c.rays.size() == 2);
}

TEST_CASE("intersect_cones") {
  Cone a = make_cone(2, {zvec({1, 0}), zvec({1, 2})});
  Cone b = make_cone(2, {zvec({1, 1}), zvec({0, 1})});
  Cone i = intersect_cones(a, b);
  REQUIRE(i.rays.size() == 2);
  CHECK(lex_compare(i.rays[0], zvec({1, 1})) == 0);
  CHECK(lex_compare(i.rays[1], zvec({1, 2})) == 0);
  // disjoint interiors meet in a face
  Cone l = make_cone(2, {zvec({1, 0}), zvec({1, 1})});
  Cone r = make_cone(2, {zvec({1, 1}), zvec({0, 1})});
  Cone w = intersect_cones(l, r);
  REQUIRE(w.rays.size() == 1);
  CHECK(lex_compare(w.rays[0], zvec({1, 1})) == 0);
}

TEST_CASE("simplex basics") {
  // max x + y st x + 2y <= 4, x <= 3, x,y >= 0 -> (3, 1/2)
  LinearProgram lp(2);
  lp.set_nonneg(0);
  lp.set_nonneg(1);
  QVec a(2);
  a << Rat(1), Rat(2);
  lp.add(a, Rel::LE, Rat(4));
  QVec b(2);
  b << Rat(1), Rat(0);
  lp.add(b, Rel::LE, Rat(3));
  QVec c(2);
  c << Rat(1), Rat(1);
  auto res = lp.maximize(c);
  REQUIRE(res.ok());
  CHECK(res.x(0) == Rat(3));
  CHECK(res.x(1) == Rat(1, 2));
  CHECK(res.value == Rat(7, 2));

  // infeasible
  LinearProgram lp2(1);
  lp2.set_nonneg(0);
  QVec one(1);
  one << Rat(1);
  lp2.add(one, Rel::LE, Rat(-1));
  CHECK(lp2.maximize(one).status == LPResult::INFEASIBLE);

  // unbounded
  LinearProgram lp3(1);
  lp3.set_nonneg(0);
  lp3.add(one, Rel::GE, Rat(1));
  CHECK(lp3.maximize(one).status == LPResult::UNBOUNDED);

  // free variables and equality
  LinearProgram lp4(2);
  QVec e1(2), e2(2);
  e1 << Rat(1), Rat(1);
  e2 << Rat(1), Rat(-1);
  lp4.add(e1, Rel::EQ, Rat(2));
  lp4.add(e2, Rel::EQ, Rat(-4));
  auto r4 = lp4.maximize(QVec::Zero(2));
  REQUIRE(r4.ok());
  CHECK(r4.x(0) == Rat(-1));
  CHECK(r4.x(1) == Rat(3));
}

TEST_CASE("lp matches brute-force vertex enumeration on random 2d problems") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> d(-4, 4);
  for (int trial = 0; trial < 40; ++trial) {
    // random LE constraints plus a box to keep things bounded
    std::vector<QVec> rows;
    std::vector<Rat> rhs;
    for (int i = 0; i < 4; ++i) {
      QVec r(2);
      r << Rat(d(rng)), Rat(d(rng));
      rows.push_back(r);
      rhs.push_back(Rat(d(rng) + 6));
    }
    for (int s = 0; s < 2; ++s)
      for (int sign = -1; sign <= 1; sign += 2) {
        QVec r = QVec::Zero(2);
        r(s) = Rat(sign);
        rows.push_back(r);
        rhs.push_back(Rat(5));
      }
    LinearProgram lp(2);
    for (size_t i = 0; i < rows.size(); ++i) lp.add(rows[i], Rel::LE, rhs[i]);
    QVec c(2);
    c << Rat(d(rng)), Rat(d(rng));
    auto res = lp.maximize(c);
    REQUIRE(res.ok());
    // brute force: intersect all constraint pairs, keep feasible vertices
    Rat best;
    bool found = false;
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t j = i + 1; j < rows.size(); ++j) {
        QMat m(2, 2);
        m.row(0) = rows[i].transpose();
        m.row(1) = rows[j].transpose();
        QVec b(2);
        b << rhs[i], rhs[j];
        auto x = solve(m, b);
        if (!x) continue;
        bool feas = true;
        for (size_t k = 0; k < rows.size(); ++k)
          if (rows[k].dot(*x) > rhs[k]) feas = false;
        if (!feas) continue;
        Rat v = c.dot(*x);
        if (!found || v > best) {
          best = v;
          found = true;
        }
      }
    REQUIRE(found);
    CHECK(res.value == best);
  }
}

TEST_CASE("facet normals agree with LP membership on random cones") {
  std::mt19937 rng(101);
  std::uniform_int_distribution<int> d(-3, 3);
  int tested = 0;
  for (int trial = 0; trial < 120 && tested < 60; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 2);
    std::vector<ZVec> gens;
    int k = 2 + static_cast<int>(rng() % 3);
    for (int g = 0; g < k; ++g) {
      ZVec v(dim);
      for (int t = 0; t < dim; ++t) v(t) = d(rng);
      gens.push_back(v);
    }
    Cone c;
    try {
      c = make_cone(dim, gens);
    } catch (const Error&) {
      continue; // generated a line
    }
    if (c.rays.empty()) continue;
    ++tested;
    // independent membership: nonnegative combination via LP
    auto lp_member = [&](const ZVec& v) {
      LinearProgram lp(static_cast<Eigen::Index>(c.rays.size()));
      for (size_t j = 0; j < c.rays.size(); ++j) lp.set_nonneg(static_cast<Eigen::Index>(j));
      for (int i = 0; i < dim; ++i) {
        QVec row(static_cast<Eigen::Index>(c.rays.size()));
        for (size_t j = 0; j < c.rays.size(); ++j) row(static_cast<Eigen::Index>(j)) = Rat(c.rays[j](i));
        lp.add(row, Rel::EQ, Rat(v(i)));
      }
      return lp.maximize(QVec::Zero(static_cast<Eigen::Index>(c.rays.size()))).ok();
    };
    for (int probe = 0; probe < 25; ++probe) {
      ZVec v(dim);
      for (int t = 0; t < dim; ++t) v(t) = d(rng);
      CHECK(contains(c, v, Strictness::Boundary) == lp_member(v));
    }
  }
  CHECK(tested >= 40);
}

TEST_CASE("cone intersection agrees with pairwise membership") {
  std::mt19937 rng(202);
  std::uniform_int_distribution<int> d(-3, 3);
  int tested = 0;
  for (int trial = 0; trial < 150 && tested < 40; ++trial) {
    int dim = 2 + static_cast<int>(rng() % 2);
    auto random_cone = [&]() {
      std::vector<ZVec> gens;
      for (int g = 0; g < 3; ++g) {
        ZVec v(dim);
        for (int t = 0; t < dim; ++t) v(t) = d(rng);
        gens.push_back(v);
      }
      return make_cone(dim, gens);
    };
    Cone a, b;
    try {
      a = random_cone();
      b = random_cone();
    } catch (const Error&) {
      continue;
    }
    if (a.rays.empty() || b.rays.empty()) continue;
    Cone inter;
    try {
      inter = intersect_cones(a, b);
    } catch (const Error&) {
      continue; // a degenerate pair slipped through
    }
    ++tested;
    for (const auto& r : inter.rays) {
      CHECK(contains(a, r, Strictness::Boundary));
      CHECK(contains(b, r, Strictness::Boundary));
    }
    for (int probe = 0; probe < 20; ++probe) {
      ZVec v(dim);
      for (int t = 0; t < dim; ++t) v(t) = d(rng);
      bool in_both = contains(a, v, Strictness::Boundary) && contains(b, v, Strictness::Boundary);
      CHECK(in_both == contains(inter, v, Strictness::Boundary));
    }
  }
  CHECK(tested >= 20);
}
