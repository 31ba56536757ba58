#include "toricfact/subdiv.hpp"

#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace toricfact {

MonomialIdeal make_ideal(const Cone& chart_in, std::vector<ZVec> gens) {
  Cone chart = make_cone(chart_in.rank, chart_in.rays);
  if (!is_smooth(chart) || chart.dim() != chart.rank)
    throw Error("make_ideal: chart must be a smooth full-dimensional cone");
  if (gens.empty()) throw Error("make_ideal: empty generator set");
  std::vector<ZVec> ded;
  std::set<std::string> seen;
  for (const auto& g : gens) {
    if (g.size() != chart.rank) throw Error("make_ideal: generator dimension mismatch");
    for (const auto& r : chart.rays)
      if (g.dot(r) < 0) throw Error("make_ideal: generator negative on the chart");
    if (seen.insert(to_string(g)).second) ded.push_back(g);
  }
  // drop generators dominated in the dual order of the chart
  std::vector<ZVec> minimal;
  for (size_t i = 0; i < ded.size(); ++i) {
    bool dominated = false;
    for (size_t j = 0; j < ded.size() && !dominated; ++j) {
      if (i == j) continue;
      ZVec diff = ded[i] - ded[j];
      bool ge = true;
      for (const auto& r : chart.rays)
        if (diff.dot(r) < 0) {
          ge = false;
          break;
        }
      // ties broken towards the lexicographically smaller generator
      if (ge && (lex_compare(diff, ZVec::Zero(chart.rank)) != 0 || j < i)) dominated = true;
    }
    if (!dominated) minimal.push_back(ded[i]);
  }
  sort_rays(minimal);
  MonomialIdeal out;
  out.chart = chart;
  out.gens = minimal;
  return out;
}

Subdivision make_subdivision(SubdivState state) {
  state.validate();
  Subdivision s;
  s.total = materialize(state);
  s.state = std::move(state);
  return s;
}

PLDatum CoherenceCertificate::datum() const {
  PLDatum f;
  f.fn.resize(fn.size());
  for (size_t i = 0; i < fn.size(); ++i) {
    std::set<std::string> seen;
    for (const auto& l : fn[i])
      if (seen.insert(to_string(l)).second) f.fn[i].push_back(l);
    sort_rays(f.fn[i]);
  }
  return f;
}

namespace {

// first maximal piece of the chart containing all the given rays
int containing_piece(const Fan& chart, const std::vector<ZVec>& rays) {
  for (size_t j = 0; j < chart.max_cones().size(); ++j) {
    bool all = true;
    for (const auto& r : rays)
      if (!contains(chart.max_cones()[j], r, Strictness::Boundary)) {
        all = false;
        break;
      }
    if (all) return static_cast<int>(j);
  }
  return -1;
}

// Strictness across the facet walls of a convex chart implies strict
// dominance between all pairs, so the LP constraint builders only need the
// adjacent pairs returned here (both orientations).
std::vector<std::pair<size_t, size_t>> adjacent_pairs(const Fan& chart) {
  std::vector<std::pair<size_t, size_t>> out;
  const auto& mc = chart.max_cones();
  for (size_t a = 0; a < mc.size(); ++a)
    for (size_t b = 0; b < mc.size(); ++b) {
      if (a == b) continue;
      Cone inter = intersect_cones(mc[a], mc[b]);
      if (inter.dim() == mc[a].dim() - 1) out.push_back({a, b});
    }
  return out;
}

std::vector<CoherenceCertificate::Wall> chart_walls(const Fan& chart) {
  std::vector<CoherenceCertificate::Wall> walls;
  const auto& mc = chart.max_cones();
  for (size_t a = 0; a < mc.size(); ++a)
    for (size_t b = a + 1; b < mc.size(); ++b) {
      Cone inter = intersect_cones(mc[a], mc[b]);
      if (inter.dim() == mc[a].dim() - 1)
        walls.push_back({static_cast<int>(a), static_cast<int>(b), Rat(0)});
    }
  return walls;
}

Rat wall_margin(const Fan& chart, const std::vector<ZVec>& fn, int a, int b) {
  Rat margin;
  bool first = true;
  auto upd = [&](const Rat& x) {
    if (first || x < margin) {
      margin = x;
      first = false;
    }
  };
  for (const auto& r : chart.max_cones()[static_cast<size_t>(b)].rays)
    if (!contains(chart.max_cones()[static_cast<size_t>(a)], r, Strictness::Boundary))
      upd(Rat((fn[static_cast<size_t>(a)] - fn[static_cast<size_t>(b)]).dot(r)));
  for (const auto& r : chart.max_cones()[static_cast<size_t>(a)].rays)
    if (!contains(chart.max_cones()[static_cast<size_t>(b)], r, Strictness::Boundary))
      upd(Rat((fn[static_cast<size_t>(b)] - fn[static_cast<size_t>(a)]).dot(r)));
  if (first) return Rat(1); // no separating ray: pieces share all rays
  return margin;
}

} // namespace

std::string check_certificate(const SubdivState& s, const CoherenceCertificate& cert) {
  const auto& base = s.base();
  if (cert.fn.size() != base.cones().size()) return "certificate chart count mismatch";
  for (size_t i = 0; i < base.cones().size(); ++i) {
    const Fan& chart = s.chart(i);
    if (cert.fn[i].size() != chart.max_cones().size())
      return "certificate piece count mismatch on chart " + std::to_string(i);
    for (const auto& l : cert.fn[i])
      if (l.size() != base.cones()[i].rank) return "certificate functional dimension mismatch";
    // dominance with strictness off the argmin piece
    for (size_t p = 0; p < chart.max_cones().size(); ++p)
      for (size_t q = 0; q < chart.max_cones().size(); ++q) {
        if (p == q) continue;
        for (const auto& r : chart.max_cones()[q].rays) {
          Int gap = (cert.fn[i][p] - cert.fn[i][q]).dot(r);
          bool in_p = contains(chart.max_cones()[p], r, Strictness::Boundary);
          if (gap < 0)
            return "dominance violated on chart " + std::to_string(i) + " pieces " +
                   std::to_string(p) + "/" + std::to_string(q) + " at ray " + to_string(r);
          if (!in_p && gap == 0)
            return "strictness violated on chart " + std::to_string(i) + " pieces " +
                   std::to_string(p) + "/" + std::to_string(q) + " at ray " + to_string(r);
        }
      }
  }
  // compatibility across base face maps
  for (const auto& m : base.maps()) {
    const Fan& src = s.chart(static_cast<size_t>(m.src));
    const Fan& dst = s.chart(static_cast<size_t>(m.dst));
    for (size_t p = 0; p < src.max_cones().size(); ++p) {
      std::vector<ZVec> image;
      for (const auto& r : src.max_cones()[p].rays) image.push_back(primitive(ZVec(m.mat * r)));
      int q = containing_piece(dst, image);
      if (q < 0) return "chart images inconsistent across face map " + m.key();
      ZVec pulled = m.mat.transpose() * cert.fn[static_cast<size_t>(m.dst)][static_cast<size_t>(q)];
      if (lex_compare(pulled, cert.fn[static_cast<size_t>(m.src)][p]) != 0)
        return "certificate incompatible with face map " + m.key();
    }
  }
  return "";
}

Subdivision subdivision_from_pl(const GenComplex& base, const PLDatum& f) {
  std::string why;
  if (!pl_compatible(base, f, &why)) throw Error("subdivision_from_pl: " + why);
  SubdivState state(base);
  for (size_t i = 0; i < base.cones().size(); ++i) {
    if (base.cones()[i].rays.empty()) continue;
    Fan single = fan_of_cone(base.cones()[i]);
    FanPL pl;
    pl.fn.push_back(f.fn[i]);
    state.chart(i) = regions_of_linearity(single, pl);
  }
  return make_subdivision(std::move(state));
}

namespace {

Fan transform_fan(const Fan& f, const ZMat& m, Eigen::Index out_dim) {
  std::vector<Cone> cones;
  for (const auto& c : f.max_cones()) {
    std::vector<ZVec> rays;
    for (const auto& r : c.rays) rays.push_back(primitive(ZVec(m * r)));
    cones.push_back(make_cone(out_dim, rays));
  }
  return Fan(out_dim, cones);
}

// final object of the base with respect to the subdivision: all face maps
// transporting local fans onto local fans, reduced and canonically framed
struct SubdivFinal {
  GenComplex complex;
  SubdivState sub;
  ComplexMorphism g; // original base -> reduced
};

SubdivFinal subdivision_final_object(const SubdivState& s) {
  const GenComplex& base = s.base();
  const int n = static_cast<int>(base.cones().size());
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)] =
        parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
    return x;
  };
  struct Edge {
    int a, b;
    ZMat m;
  };
  std::vector<Edge> edges;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (find(a) == find(b) && a != b) continue;
      const Cone& ca = base.cones()[static_cast<size_t>(a)];
      const Cone& cb = base.cones()[static_cast<size_t>(b)];
      if (ca.dim() != cb.dim()) continue;
      for (const auto& m : cone_isomorphisms(ca, cb)) {
        if (!(transform_fan(s.chart(static_cast<size_t>(a)), m, cb.rank) ==
              s.chart(static_cast<size_t>(b))))
          continue;
        edges.push_back({a, b, m});
        parent[static_cast<size_t>(find(a))] = find(b);
        break;
      }
    }
  std::vector<ZMat> to_root(static_cast<size_t>(n));
  std::vector<bool> have(static_cast<size_t>(n), false);
  std::map<int, int> root_rep;
  for (int i = 0; i < n; ++i)
    if (!root_rep.count(find(i))) root_rep[find(i)] = i;
  for (const auto& [r, rep] : root_rep) {
    to_root[static_cast<size_t>(rep)] = zident(base.cones()[static_cast<size_t>(rep)].rank);
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

  struct ClassData {
    int rep;
    ZMat frame;
    Cone cone;
    Fan chart;
  };
  std::vector<ClassData> classes;
  for (const auto& [r, rep] : root_rep) {
    const Cone& c = base.cones()[static_cast<size_t>(rep)];
    const Fan& chart = s.chart(static_cast<size_t>(rep));
    ClassData cd;
    cd.rep = rep;
    if (is_smooth(c) && !c.rays.empty()) {
      std::vector<size_t> perm(c.rays.size());
      std::iota(perm.begin(), perm.end(), 0);
      bool first = true;
      std::string best;
      do {
        ZMat p(c.rank, c.rank);
        for (size_t t = 0; t < perm.size(); ++t) {
          ZVec e = ZVec::Zero(c.rank);
          e(static_cast<Eigen::Index>(perm[t])) = 1;
          p.col(static_cast<Eigen::Index>(t)) = e;
        }
        ZMat g = p * inverse_unimodular(c.ray_matrix());
        Fan tf = transform_fan(chart, g, c.rank);
        std::string key = tf.key();
        if (first || key < best) {
          first = false;
          best = key;
          cd.frame = g;
          cd.chart = tf;
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
      cd.chart = chart;
    }
    classes.push_back(cd);
  }
  std::sort(classes.begin(), classes.end(), [](const ClassData& x, const ClassData& y) {
    if (x.cone.dim() != y.cone.dim()) return x.cone.dim() < y.cone.dim();
    std::string kx = x.chart.key(), ky = y.chart.key();
    if (kx != ky) return kx < ky;
    if (x.cone.key() != y.cone.key()) return x.cone.key() < y.cone.key();
    return x.rep < y.rep;
  });
  std::map<int, int> class_of_root;
  for (size_t k = 0; k < classes.size(); ++k)
    class_of_root[find(classes[k].rep)] = static_cast<int>(k);

  std::vector<Cone> rep_cones;
  for (const auto& cd : classes) rep_cones.push_back(cd.cone);
  std::vector<FaceMapRec> rep_maps;
  for (size_t a = 0; a < classes.size(); ++a)
    for (size_t b = 0; b < classes.size(); ++b) {
      const Cone& ca = rep_cones[a];
      const Cone& cb = rep_cones[b];
      if (ca.dim() > cb.dim()) continue;
      for (const auto& face : faces(cb)) {
        if (face.dim() != ca.dim()) continue;
        SaturationBasis sb = face.rays.empty() ? SaturationBasis{ZMat(cb.rank, 0), ZMat(0, cb.rank), 0}
                                               : saturate_span(face.ray_matrix());
        std::vector<ZVec> frays;
        for (const auto& r : face.rays) frays.push_back(sb.coords * r);
        Cone fabstract = face.rays.empty() ? Cone{0, {}} : make_cone(face.dim(), frays);
        for (const auto& m0 : cone_isomorphisms(ca, fabstract)) {
          ZMat full = sb.basis * m0;
          // compatibility: b's chart restricted along the map equals a's chart
          Fan restricted = restrict_chart(classes[b].chart, cb, full, ca);
          if (!(restricted == classes[a].chart)) continue;
          rep_maps.push_back({static_cast<int>(a), static_cast<int>(b), full});
        }
      }
    }

  SubdivFinal out;
  out.complex = GenComplex::build(rep_cones, rep_maps, false);
  out.sub = SubdivState(out.complex);
  for (size_t k = 0; k < classes.size(); ++k) out.sub.chart(k) = classes[k].chart;
  out.g.cone_to.resize(static_cast<size_t>(n));
  out.g.mats.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    int k = class_of_root[find(i)];
    out.g.cone_to[static_cast<size_t>(i)] = k;
    out.g.mats[static_cast<size_t>(i)] =
        classes[static_cast<size_t>(k)].frame * to_root[static_cast<size_t>(i)];
  }
  return out;
}

} // namespace

std::optional<CoherenceCertificate> certify_coherence(const SubdivState& s) {
  SubdivFinal fin = subdivision_final_object(s);
  const GenComplex& base = fin.complex;

  // variable layout
  std::vector<std::vector<Eigen::Index>> var_base(base.cones().size());
  Eigen::Index nvars = 0;
  for (size_t i = 0; i < base.cones().size(); ++i) {
    for (size_t p = 0; p < fin.sub.chart(i).max_cones().size(); ++p) {
      var_base[i].push_back(nvars);
      nvars += base.cones()[i].rank;
    }
  }
  const Eigen::Index tvar = nvars;
  ++nvars;

  LinearProgram lp(nvars);
  lp.set_nonneg(tvar);
  auto coeff_row = [&]() { return QVec(QVec::Zero(nvars)); };

  // compatibility across face maps of the final object
  for (const auto& m : base.maps()) {
    const Fan& src = fin.sub.chart(static_cast<size_t>(m.src));
    const Fan& dst = fin.sub.chart(static_cast<size_t>(m.dst));
    const Eigen::Index dsrc = base.cones()[static_cast<size_t>(m.src)].rank;
    for (size_t p = 0; p < src.max_cones().size(); ++p) {
      std::vector<ZVec> image;
      for (const auto& r : src.max_cones()[p].rays) image.push_back(primitive(ZVec(m.mat * r)));
      int q = containing_piece(dst, image);
      if (q < 0) throw Error("certify_coherence: inconsistent charts");
      for (Eigen::Index k = 0; k < dsrc; ++k) {
        QVec row = coeff_row();
        row(var_base[static_cast<size_t>(m.src)][p] + k) = 1;
        for (Eigen::Index j = 0; j < base.cones()[static_cast<size_t>(m.dst)].rank; ++j)
          row(var_base[static_cast<size_t>(m.dst)][static_cast<size_t>(q)] + j) -= Rat(m.mat(j, k));
        lp.add(row, Rel::EQ, Rat(0));
      }
    }
  }

  // dominance with margin across the facet walls (sufficient on convex charts)
  std::vector<std::vector<std::pair<size_t, size_t>>> adj(base.cones().size());
  for (size_t i = 0; i < base.cones().size(); ++i) adj[i] = adjacent_pairs(fin.sub.chart(i));
  for (size_t i = 0; i < base.cones().size(); ++i) {
    const Fan& chart = fin.sub.chart(i);
    const Eigen::Index d = base.cones()[i].rank;
    for (const auto& [p, q] : adj[i]) {
      for (const auto& r : chart.max_cones()[q].rays) {
        bool in_p = contains(chart.max_cones()[p], r, Strictness::Boundary);
        QVec row = coeff_row();
        for (Eigen::Index k = 0; k < d; ++k) {
          row(var_base[i][p] + k) += Rat(r(k));
          row(var_base[i][q] + k) -= Rat(r(k));
        }
        if (!in_p) row(tvar) = -1;
        lp.add(row, Rel::GE, Rat(0));
      }
    }
  }
  {
    QVec row = coeff_row();
    row(tvar) = 1;
    lp.add(row, Rel::LE, Rat(1));
  }
  QVec obj = QVec::Zero(nvars);
  obj(tvar) = 1;
  LPResult res = lp.maximize(obj);
  if (!res.ok() || res.value <= 0) return std::nullopt;

  // canonicalize: fix t, minimize the l1 norm of the functionals
  {
    LinearProgram lp2(nvars + (nvars - 1));
    lp2.set_nonneg(tvar);
    // copy constraints by rebuilding: reuse lp by adding is not possible, so
    // rebuild with the same layout plus slack variables s_j >= |x_j|
    // (constraints are reconstructed identically below)
    LinearProgram* cur = &lp2;
    (void)cur;
    // rebuild
    auto wide = [&](const QVec& row) {
      QVec w = QVec::Zero(nvars + (nvars - 1));
      w.head(nvars) = row;
      return w;
    };
    for (const auto& m : base.maps()) {
      const Fan& src = fin.sub.chart(static_cast<size_t>(m.src));
      const Fan& dst = fin.sub.chart(static_cast<size_t>(m.dst));
      const Eigen::Index dsrc = base.cones()[static_cast<size_t>(m.src)].rank;
      for (size_t p = 0; p < src.max_cones().size(); ++p) {
        std::vector<ZVec> image;
        for (const auto& r : src.max_cones()[p].rays) image.push_back(primitive(ZVec(m.mat * r)));
        int q = containing_piece(dst, image);
        for (Eigen::Index k = 0; k < dsrc; ++k) {
          QVec row = coeff_row();
          row(var_base[static_cast<size_t>(m.src)][p] + k) = 1;
          for (Eigen::Index j = 0; j < base.cones()[static_cast<size_t>(m.dst)].rank; ++j)
            row(var_base[static_cast<size_t>(m.dst)][static_cast<size_t>(q)] + j) -= Rat(m.mat(j, k));
          lp2.add(wide(row), Rel::EQ, Rat(0));
        }
      }
    }
    for (size_t i = 0; i < base.cones().size(); ++i) {
      const Fan& chart = fin.sub.chart(i);
      const Eigen::Index d = base.cones()[i].rank;
      for (const auto& [p, q] : adj[i]) {
        for (const auto& r : chart.max_cones()[q].rays) {
          bool in_p = contains(chart.max_cones()[p], r, Strictness::Boundary);
          QVec row = coeff_row();
          for (Eigen::Index k = 0; k < d; ++k) {
            row(var_base[i][p] + k) += Rat(r(k));
            row(var_base[i][q] + k) -= Rat(r(k));
          }
          if (!in_p) row(tvar) = -1;
          lp2.add(wide(row), Rel::GE, Rat(0));
        }
      }
    }
    {
      QVec row = coeff_row();
      row(tvar) = 1;
      lp2.add(wide(row), Rel::EQ, res.value);
    }
    for (Eigen::Index j = 0; j < nvars - 1; ++j) {
      lp2.set_nonneg(nvars + j);
      QVec r1 = QVec::Zero(nvars + (nvars - 1));
      r1(nvars + j) = 1;
      r1(j) = -1;
      lp2.add(r1, Rel::GE, Rat(0));
      QVec r2 = QVec::Zero(nvars + (nvars - 1));
      r2(nvars + j) = 1;
      r2(j) = 1;
      lp2.add(r2, Rel::GE, Rat(0));
    }
    QVec obj2 = QVec::Zero(nvars + (nvars - 1));
    for (Eigen::Index j = 0; j < nvars - 1; ++j) obj2(nvars + j) = 1;
    LPResult res2 = lp2.minimize(obj2);
    if (res2.ok()) res.x = res2.x.head(nvars);
  }

  // integral scaling
  QVec sol = res.x;
  Int l = 1;
  for (Eigen::Index j = 0; j < nvars - 1; ++j) {
    Rat r = sol(j);
    r.canonicalize();
    Int den = r.get_den();
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
  }
  // certificate on the final object
  std::vector<std::vector<ZVec>> fin_fn(base.cones().size());
  for (size_t i = 0; i < base.cones().size(); ++i) {
    const Eigen::Index d = base.cones()[i].rank;
    for (size_t p = 0; p < fin.sub.chart(i).max_cones().size(); ++p) {
      ZVec v(d);
      for (Eigen::Index k = 0; k < d; ++k) {
        Rat r = sol(var_base[i][p] + k) * Rat(l);
        r.canonicalize();
        v(k) = r.get_num();
      }
      fin_fn[i].push_back(v);
    }
  }

  // pull back to the original base
  CoherenceCertificate cert;
  cert.fn.resize(s.base().cones().size());
  for (size_t a = 0; a < s.base().cones().size(); ++a) {
    int k = fin.g.cone_to[a];
    const ZMat& ga = fin.g.mats[a];
    const Fan& repchart = fin.sub.chart(static_cast<size_t>(k));
    for (const auto& piece : s.chart(a).max_cones()) {
      std::vector<ZVec> image;
      for (const auto& r : piece.rays) image.push_back(primitive(ZVec(ga * r)));
      Cone img = make_cone(ga.rows(), image);
      int q = -1;
      for (size_t j = 0; j < repchart.max_cones().size(); ++j)
        if (repchart.max_cones()[j] == img) {
          q = static_cast<int>(j);
          break;
        }
      if (q < 0) throw Error("certify_coherence: pullback piece not found");
      cert.fn[a].push_back(ga.transpose() * fin_fn[static_cast<size_t>(k)][static_cast<size_t>(q)]);
    }
  }
  // walls and margins
  cert.walls.resize(s.base().cones().size());
  for (size_t i = 0; i < s.base().cones().size(); ++i) {
    cert.walls[i] = chart_walls(s.chart(i));
    for (auto& w : cert.walls[i]) w.margin = wall_margin(s.chart(i), cert.fn[i], w.piece_a, w.piece_b);
  }
  std::string bad = check_certificate(s, cert);
  if (!bad.empty()) throw Error("certify_coherence: produced an invalid certificate: " + bad);
  return cert;
}

AffinePL pl_from_ideal(const MonomialIdeal& ideal) {
  AffinePL out;
  FanAsComplex fc = fan_to_complex(fan_of_cone(ideal.chart));
  out.complex = fc.complex;
  out.top = -1;
  for (size_t i = 0; i < out.complex.cones().size(); ++i)
    if (out.complex.cones()[i].dim() == ideal.chart.dim()) out.top = static_cast<int>(i);
  if (out.top < 0) throw Error("pl_from_ideal: top cone not found");
  out.f.fn.resize(out.complex.cones().size());
  for (size_t i = 0; i < out.complex.cones().size(); ++i) {
    std::vector<int> ms = out.complex.maps_between(static_cast<int>(i), out.top);
    if (ms.empty()) throw Error("pl_from_ideal: face map to the top cone missing");
    const ZMat& m = out.complex.maps()[static_cast<size_t>(ms[0])].mat;
    std::set<std::string> seen;
    for (const auto& g : ideal.gens) {
      ZVec l = m.transpose() * g;
      if (seen.insert(to_string(l)).second) out.f.fn[i].push_back(l);
    }
    sort_rays(out.f.fn[i]);
  }
  return out;
}

MonomialIdeal ideal_from_pl(const Cone& chart, const std::vector<ZVec>& fns, bool normalize,
                            ZVec* factor) {
  if (fns.empty()) throw Error("ideal_from_pl: no linear functional bounds the datum");
  if (!is_smooth(chart) || chart.dim() != chart.rank)
    throw Error("ideal_from_pl: chart must be smooth and full-dimensional");
  const Eigen::Index d = chart.rank;
  ZMat r = chart.ray_matrix();
  // ray coordinates: l' = R^T l
  std::vector<ZVec> prim;
  for (const auto& l : fns) prim.push_back(r.transpose() * l);
  ZVec lstar(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Int m = prim[0](j);
    for (const auto& l : prim) m = std::min(m, l(j), [](const Int& a, const Int& b) { return a < b; });
    lstar(j) = m;
  }
  if (normalize)
    for (auto& l : prim) l -= lstar;
  // minimal lattice points of conv(prim) + nonnegative orthant
  Int mcoord = 0;
  for (const auto& l : prim)
    for (Eigen::Index j = 0; j < d; ++j) mcoord = std::max(mcoord, l(j), [](const Int& a, const Int& b) { return a < b; });
  if (mcoord > 40) throw Error("ideal_from_pl: enumeration bound exceeded");
  long m = mcoord.get_si();
  std::vector<ZVec> points;
  ZVec cursor = ZVec::Zero(d);
  for (;;) {
    points.push_back(cursor);
    Eigen::Index i = 0;
    for (; i < d; ++i) {
      if (cursor(i) < m) {
        cursor(i) += 1;
        for (Eigen::Index j = 0; j < i; ++j) cursor(j) = 0;
        break;
      }
    }
    if (i == d) break;
  }
  std::vector<ZVec> members;
  for (const auto& pt : points) {
    // pt in conv(prim) + orthant: exists lambda >= 0, sum 1, pt >= sum lambda l
    const Eigen::Index k = static_cast<Eigen::Index>(prim.size());
    LinearProgram lp(k);
    for (Eigen::Index j = 0; j < k; ++j) lp.set_nonneg(j);
    QVec ones = QVec::Constant(k, Rat(1));
    lp.add(ones, Rel::EQ, Rat(1));
    for (Eigen::Index i = 0; i < d; ++i) {
      QVec row(k);
      for (Eigen::Index j = 0; j < k; ++j) row(j) = Rat(prim[static_cast<size_t>(j)](i));
      lp.add(row, Rel::LE, Rat(pt(i)));
    }
    if (lp.maximize(QVec::Zero(k)).ok()) members.push_back(pt);
  }
  // coordinatewise-minimal members
  std::vector<ZVec> minimal;
  for (size_t i = 0; i < members.size(); ++i) {
    bool dominated = false;
    for (size_t j = 0; j < members.size() && !dominated; ++j) {
      if (i == j) continue;
      bool le = true, lt = false;
      for (Eigen::Index t = 0; t < d; ++t) {
        if (members[j](t) > members[i](t)) le = false;
        if (members[j](t) < members[i](t)) lt = true;
      }
      if (le && lt) dominated = true;
    }
    if (!dominated) minimal.push_back(members[i]);
  }
  // back to ambient coordinates: m = R^{-T} m'
  ZMat rinv = inverse_unimodular(r);
  std::vector<ZVec> gens;
  for (const auto& g : minimal) gens.push_back(rinv.transpose() * g);
  if (factor) *factor = rinv.transpose() * lstar;
  return make_ideal(chart, gens);
}

MonomialIdeal veronese(const MonomialIdeal& ideal, int k) {
  if (k < 1) throw Error("veronese: k must be positive");
  if (k == 1) return ideal;
  // all k-fold sums of generators
  std::vector<ZVec> sums;
  std::function<void(size_t, int, ZVec)> rec = [&](size_t start, int left, ZVec acc) {
    if (left == 0) {
      sums.push_back(acc);
      return;
    }
    for (size_t i = start; i < ideal.gens.size(); ++i) rec(i, left - 1, ZVec(acc + ideal.gens[i]));
  };
  rec(0, k, ZVec(ZVec::Zero(ideal.chart.rank)));
  return make_ideal(ideal.chart, sums);
}

PLDatum veronese(const PLDatum& f, int k) {
  if (k < 1) throw Error("veronese: k must be positive");
  PLDatum out = f;
  for (auto& fs : out.fn)
    for (auto& l : fs) l *= Int(k);
  return out;
}

std::vector<ZVec> exceptional_certificate(const Fan& fine, const std::vector<ZVec>& old_rays,
                                          const std::vector<ZVec>& inserted) {
  std::set<std::string> old_set;
  for (const auto& r : old_rays) old_set.insert(to_string(r));
  std::vector<std::string> ins_keys;
  for (const auto& w : inserted) ins_keys.push_back(to_string(w));

  auto solve_piece = [&](const Cone& piece, const std::vector<Rat>& values) -> QVec {
    // functional with the given value at each inserted ray, zero on old rays
    const Eigen::Index d = fine.ambient();
    QMat a(static_cast<Eigen::Index>(piece.rays.size()), d);
    QVec b(static_cast<Eigen::Index>(piece.rays.size()));
    for (size_t t = 0; t < piece.rays.size(); ++t) {
      for (Eigen::Index j = 0; j < d; ++j) a(static_cast<Eigen::Index>(t), j) = Rat(piece.rays[t](j));
      std::string k = to_string(piece.rays[t]);
      Rat v = 0;
      for (size_t i = 0; i < ins_keys.size(); ++i)
        if (k == ins_keys[i]) v = values[i];
      if (v == 0 && !old_set.count(k) &&
          std::find(ins_keys.begin(), ins_keys.end(), k) == ins_keys.end())
        throw Error("exceptional_certificate: unexpected ray " + k);
      b(static_cast<Eigen::Index>(t)) = v;
    }
    auto x = solve(a, b);
    if (!x) throw Error("exceptional_certificate: inconsistent ray values on a piece");
    return *x;
  };

  // pass 1: per inserted ray, find the denominator scale
  std::vector<Int> lambda(inserted.size(), Int(1));
  for (size_t i = 0; i < inserted.size(); ++i) {
    std::vector<Rat> values(inserted.size(), Rat(0));
    values[i] = 1;
    for (const auto& piece : fine.max_cones()) {
      QVec l = solve_piece(piece, values);
      for (Eigen::Index j = 0; j < l.size(); ++j) {
        Rat r = l(j);
        r.canonicalize();
        Int den = r.get_den();
        mpz_lcm(lambda[i].get_mpz_t(), lambda[i].get_mpz_t(), den.get_mpz_t());
      }
    }
  }
  // pass 2: integral functionals
  std::vector<Rat> values;
  for (size_t i = 0; i < inserted.size(); ++i) values.push_back(Rat(lambda[i]));
  std::vector<ZVec> out;
  for (const auto& piece : fine.max_cones()) {
    QVec l = solve_piece(piece, values);
    ZVec z(l.size());
    for (Eigen::Index j = 0; j < l.size(); ++j) {
      Rat r = l(j);
      r.canonicalize();
      if (r.get_den() != 1) throw Error("exceptional_certificate: scaling failed");
      z(j) = r.get_num();
    }
    out.push_back(z);
  }
  return out;
}

std::vector<std::vector<ZVec>> star_stage_certificate(const SubdivState& before,
                                                      const CenterSet& centers,
                                                      const SubdivState& after) {
  std::vector<std::vector<ZVec>> out(before.base().cones().size());
  for (size_t i = 0; i < before.base().cones().size(); ++i) {
    std::vector<ZVec> old = before.chart(i).rays();
    std::vector<ZVec> inserted;
    std::set<std::string> seen;
    for (const auto& c : centers.per_chart[i])
      if (seen.insert(to_string(c.point)).second) inserted.push_back(c.point);
    sort_rays(inserted);
    out[i] = exceptional_certificate(after.chart(i), old, inserted);
  }
  return out;
}

CoherenceCertificate compose_blowups(const GenComplex& base, const std::vector<BlowupStage>& chain,
                                     const Int& bound) {
  if (chain.empty()) throw Error("compose_blowups: empty chain");
  for (const auto& st : chain)
    if (!(st.cumulative.base() == base)) throw Error("compose_blowups: stage over a different base");
  for (size_t k = 0; k + 1 < chain.size(); ++k)
    if (!chain[k + 1].cumulative.refines(chain[k].cumulative))
      throw Error("compose_blowups: chain is not a tower of refinements");
  const SubdivState& fin = chain.back().cumulative;

  // transport all stage functionals to the final pieces
  const size_t nstages = chain.size();
  std::vector<std::vector<std::vector<ZVec>>> lfn(nstages); // stage -> chart -> final piece
  for (size_t k = 0; k < nstages; ++k) {
    lfn[k].resize(base.cones().size());
    for (size_t i = 0; i < base.cones().size(); ++i) {
      for (const auto& piece : fin.chart(i).max_cones()) {
        int host = containing_piece(chain[k].cumulative.chart(i), piece.rays);
        if (host < 0) throw Error("compose_blowups: final piece not inside a stage piece");
        lfn[k][i].push_back(chain[k].stage_fn[i][static_cast<size_t>(host)]);
      }
    }
  }

  // LP: weights N_k >= 1, strict dominance of the weighted sum
  const Eigen::Index nv = static_cast<Eigen::Index>(nstages);
  LinearProgram lp(nv);
  for (Eigen::Index j = 0; j < nv; ++j) {
    lp.set_nonneg(j);
    QVec row = QVec::Zero(nv);
    row(j) = 1;
    lp.add(row, Rel::GE, Rat(1));
  }
  for (size_t i = 0; i < base.cones().size(); ++i) {
    const Fan& chart = fin.chart(i);
    for (const auto& [p, q] : adjacent_pairs(chart)) {
      for (const auto& r : chart.max_cones()[q].rays) {
        bool in_p = contains(chart.max_cones()[p], r, Strictness::Boundary);
        QVec row = QVec::Zero(nv);
        for (size_t k = 0; k < nstages; ++k)
          row(static_cast<Eigen::Index>(k)) = Rat((lfn[k][i][p] - lfn[k][i][q]).dot(r));
        lp.add(row, Rel::GE, in_p ? Rat(0) : Rat(1));
      }
    }
  }
  QVec obj = QVec::Constant(nv, Rat(1));
  LPResult res = lp.minimize(obj);
  if (!res.ok())
    throw Error("compose_blowups: no composition weights exist (LP infeasible)");
  Int l = 1;
  for (Eigen::Index j = 0; j < nv; ++j) {
    Rat r = res.x(j);
    r.canonicalize();
    Int den = r.get_den();
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
  }
  std::vector<Int> weights;
  for (Eigen::Index j = 0; j < nv; ++j) {
    Rat r = res.x(j) * Rat(l);
    r.canonicalize();
    weights.push_back(r.get_num());
    if (weights.back() > bound)
      throw Error("compose_blowups: weights exceed the configured bound");
  }

  CoherenceCertificate cert;
  cert.fn.resize(base.cones().size());
  for (size_t i = 0; i < base.cones().size(); ++i) {
    const Fan& chart = fin.chart(i);
    for (size_t p = 0; p < chart.max_cones().size(); ++p) {
      ZVec acc = ZVec::Zero(base.cones()[i].rank);
      for (size_t k = 0; k < nstages; ++k) acc += weights[k] * lfn[k][i][p];
      cert.fn[i].push_back(acc);
    }
    cert.walls.push_back(chart_walls(chart));
    for (auto& w : cert.walls.back())
      w.margin = wall_margin(chart, cert.fn[i], w.piece_a, w.piece_b);
  }
  std::string bad = check_certificate(fin, cert);
  if (!bad.empty()) throw Error("compose_blowups: produced an invalid certificate: " + bad);
  return cert;
}

} // namespace toricfact
