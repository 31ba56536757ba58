#include "toricfact/engine.hpp"

#include <map>
#include <set>

namespace toricfact {

std::vector<int> u_subcomplex(const GenComplex& cx, const PLDatum& f,
                              const std::vector<int>& boundary_rays) {
  std::set<int> boundary(boundary_rays.begin(), boundary_rays.end());
  std::vector<int> out;
  for (size_t i = 0; i < cx.cones().size(); ++i) {
    const Cone& c = cx.cones()[i];
    std::vector<ZVec> ess = essential_functionals(c, f.fn[i]);
    bool zero = ess.size() == 1 && is_zero(ess[0]);
    if (!zero) continue;
    bool touches_boundary = false;
    for (int b : boundary)
      if (!cx.maps_between(b, static_cast<int>(i)).empty()) touches_boundary = true;
    if (!touches_boundary) out.push_back(static_cast<int>(i));
  }
  return out;
}

namespace {

// certificate of a subdivision cut out by its own defining datum
CoherenceCertificate certificate_from_datum(const SubdivState& s, const PLDatum& f) {
  CoherenceCertificate cert;
  cert.fn.resize(s.base().cones().size());
  cert.walls.resize(s.base().cones().size());
  for (size_t i = 0; i < s.base().cones().size(); ++i) {
    for (const auto& piece : s.chart(i).max_cones()) {
      const ZVec* best = nullptr;
      for (const auto& l : f.fn[i]) {
        bool attains = true;
        for (const auto& other : f.fn[i]) {
          for (const auto& r : piece.rays)
            if (l.dot(r) > other.dot(r)) {
              attains = false;
              break;
            }
          if (!attains) break;
        }
        if (attains) {
          best = &l;
          break;
        }
      }
      if (!best) throw Error("certificate_from_datum: datum is not linear on a piece");
      cert.fn[i].push_back(*best);
    }
  }
  std::string bad = check_certificate(s, cert);
  if (!bad.empty()) throw Error("certificate_from_datum: " + bad);
  return cert;
}

// carrier base cone (smallest index) of a piece inside a chart
int piece_carrier(const GenComplex& cx, int chart, const Cone& piece) {
  const Cone& bc = cx.cones()[static_cast<size_t>(chart)];
  std::vector<ZVec> frays;
  if (!piece.rays.empty()) {
    ZVec z = ZVec::Zero(bc.rank);
    for (const auto& r : piece.rays) z += r;
    for (int ri : minimal_face_ray_indices(bc, z)) frays.push_back(bc.rays[static_cast<size_t>(ri)]);
  }
  Cone face = make_cone(bc.rank, frays);
  int best = -1;
  for (const auto& m : cx.maps()) {
    if (m.dst != chart) continue;
    const Cone& cs = cx.cones()[static_cast<size_t>(m.src)];
    if (cs.dim() != face.dim()) continue;
    std::vector<ZVec> im;
    for (const auto& r : cs.rays) im.push_back(primitive(ZVec(m.mat * r)));
    if (!(make_cone(bc.rank, im) == face)) continue;
    if (best < 0 || m.src < best) best = m.src;
  }
  if (best < 0) throw Error("piece_carrier: carrier not found");
  return best;
}

BlowupStage stage_of(const SubdivState& before, const CenterSet& centers,
                     const SubdivState& after) {
  BlowupStage st;
  st.cumulative = after;
  st.stage_fn = star_stage_certificate(before, centers, after);
  return st;
}

} // namespace

std::vector<StarPathStep> smooth_star_path(const SubdivState& from, const SubdivState& to,
                                           int max_steps) {
  if (!to.refines(from)) throw Error("smooth_star_path: target does not refine the start");
  std::vector<StarPathStep> out;
  SubdivState cur = from;
  for (int step = 0; step < max_steps; ++step) {
    if (cur == to) return out;
    struct Candidate {
      ZVec b;
      size_t chart;
      Cone piece;
    };
    std::vector<Candidate> cands;
    for (size_t i = 0; i < cur.charts().size(); ++i) {
      std::set<std::string> cur_rays, to_rays;
      for (const auto& r : cur.chart(i).rays()) cur_rays.insert(to_string(r));
      for (const auto& r : to.chart(i).rays()) to_rays.insert(to_string(r));
      for (const auto& p : cur.chart(i).all_cones()) {
        if (p.dim() < 2) continue;
        ZVec b = barycenter(p);
        std::string k = to_string(b);
        if (!to_rays.count(k) || cur_rays.count(k)) continue;
        cands.push_back({b, i, p});
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
      int c = lex_compare(x.b, y.b);
      if (c != 0) return c > 0;
      if (x.chart != y.chart) return x.chart < y.chart;
      return x.piece.key() < y.piece.key();
    });
    bool progressed = false;
    std::set<std::string> tried;
    for (const auto& cand : cands) {
      CenterSet seed;
      seed.per_chart.resize(cur.base().cones().size());
      seed.per_chart[cand.chart].push_back(barycentric_center(cand.piece));
      CenterSet closed = activate_centers(cur, seed);
      std::string key;
      for (const auto& per : closed.per_chart)
        for (const auto& c : per) key += c.key() + ";";
      if (!tried.insert(key).second) continue;
      SubdivState next = cur;
      star_round(next, closed);
      if (!to.refines(next)) continue; // overshoots a wall of the target
      out.push_back({closed, next});
      cur = next;
      progressed = true;
      break;
    }
    if (!progressed) throw Error("smooth_star_path: search stalled before reaching the target");
  }
  throw Error("smooth_star_path: step bound exceeded");
}

std::vector<StarPathStep> barycentric_rounds(const SubdivState& state,
                                             const std::vector<int>& u_cones) {
  std::set<int> u(u_cones.begin(), u_cones.end());
  std::vector<StarPathStep> out;
  SubdivState cur = state;
  // original pieces, fixed before any round
  std::vector<std::vector<Cone>> original(state.charts().size());
  Eigen::Index maxdim = 0;
  for (size_t i = 0; i < state.charts().size(); ++i) {
    original[i] = state.chart(i).all_cones();
    for (const auto& p : original[i]) maxdim = std::max(maxdim, p.dim());
  }
  for (Eigen::Index d = maxdim; d >= 2; --d) {
    CenterSet centers;
    centers.per_chart.resize(state.base().cones().size());
    bool any = false;
    for (size_t i = 0; i < original.size(); ++i)
      for (const auto& p : original[i]) {
        if (p.dim() != d) continue;
        if (u.count(piece_carrier(state.base(), static_cast<int>(i), p))) continue;
        centers.per_chart[i].push_back(barycentric_center(p));
        any = true;
      }
    if (!any) continue;
    CenterSet closed = activate_centers(cur, centers);
    star_round(cur, closed);
    out.push_back({closed, cur});
  }
  return out;
}

std::optional<CoherenceCertificate> certify_relative(const SubdivState& coarse,
                                                     const SubdivState& fine) {
  if (!(coarse.base() == fine.base())) throw Error("certify_relative: different bases");
  if (!fine.refines(coarse)) throw Error("certify_relative: fine does not refine coarse");
  const GenComplex& base = coarse.base();

  std::vector<std::vector<Eigen::Index>> var_base(base.cones().size());
  Eigen::Index nvars = 0;
  for (size_t i = 0; i < base.cones().size(); ++i)
    for (size_t p = 0; p < fine.chart(i).max_cones().size(); ++p) {
      var_base[i].push_back(nvars);
      nvars += base.cones()[i].rank;
    }
  const Eigen::Index tvar = nvars;
  ++nvars;

  LinearProgram lp(nvars);
  lp.set_nonneg(tvar);
  // compatibility across base maps
  for (const auto& m : base.maps()) {
    const Fan& src = fine.chart(static_cast<size_t>(m.src));
    const Fan& dst = fine.chart(static_cast<size_t>(m.dst));
    for (size_t p = 0; p < src.max_cones().size(); ++p) {
      std::vector<ZVec> image;
      for (const auto& r : src.max_cones()[p].rays) image.push_back(primitive(ZVec(m.mat * r)));
      int q = -1;
      for (size_t j = 0; j < dst.max_cones().size(); ++j) {
        bool all = true;
        for (const auto& r : image)
          if (!contains(dst.max_cones()[j], r, Strictness::Boundary)) {
            all = false;
            break;
          }
        if (all) {
          q = static_cast<int>(j);
          break;
        }
      }
      if (q < 0) throw Error("certify_relative: inconsistent charts");
      for (Eigen::Index k = 0; k < base.cones()[static_cast<size_t>(m.src)].rank; ++k) {
        QVec row = QVec::Zero(nvars);
        row(var_base[static_cast<size_t>(m.src)][p] + k) = 1;
        for (Eigen::Index j = 0; j < base.cones()[static_cast<size_t>(m.dst)].rank; ++j)
          row(var_base[static_cast<size_t>(m.dst)][static_cast<size_t>(q)] + j) -= Rat(m.mat(j, k));
        lp.add(row, Rel::EQ, Rat(0));
      }
    }
  }
  // strictness within coarse pieces; continuity across them
  for (size_t i = 0; i < base.cones().size(); ++i) {
    const Fan& cf = fine.chart(i);
    const Fan& cc = coarse.chart(i);
    const Eigen::Index d = base.cones()[i].rank;
    // which coarse piece hosts each fine piece
    std::vector<int> host(cf.max_cones().size(), -1);
    for (size_t p = 0; p < cf.max_cones().size(); ++p)
      for (size_t j = 0; j < cc.max_cones().size(); ++j) {
        bool all = true;
        for (const auto& r : cf.max_cones()[p].rays)
          if (!contains(cc.max_cones()[j], r, Strictness::Boundary)) {
            all = false;
            break;
          }
        if (all) {
          host[p] = static_cast<int>(j);
          break;
        }
      }
    for (size_t p = 0; p < cf.max_cones().size(); ++p)
      for (size_t q = 0; q < cf.max_cones().size(); ++q) {
        if (p == q) continue;
        if (q < p && host[p] != host[q]) continue;
        Cone wall = intersect_cones(cf.max_cones()[p], cf.max_cones()[q]);
        if (wall.dim() != cf.max_cones()[p].dim() - 1) continue;
        if (host[p] == host[q]) {
          for (const auto& r : cf.max_cones()[q].rays) {
            bool in_p = contains(cf.max_cones()[p], r, Strictness::Boundary);
            QVec row = QVec::Zero(nvars);
            for (Eigen::Index k = 0; k < d; ++k) {
              row(var_base[i][p] + k) += Rat(r(k));
              row(var_base[i][q] + k) -= Rat(r(k));
            }
            if (!in_p) row(tvar) = -1;
            lp.add(row, Rel::GE, Rat(0));
          }
        } else {
          for (const auto& r : wall.rays) {
            QVec row = QVec::Zero(nvars);
            for (Eigen::Index k = 0; k < d; ++k) {
              row(var_base[i][p] + k) += Rat(r(k));
              row(var_base[i][q] + k) -= Rat(r(k));
            }
            lp.add(row, Rel::EQ, Rat(0));
          }
        }
      }
  }
  {
    QVec row = QVec::Zero(nvars);
    row(tvar) = 1;
    lp.add(row, Rel::LE, Rat(1));
  }
  QVec obj = QVec::Zero(nvars);
  obj(tvar) = 1;
  LPResult res = lp.maximize(obj);
  if (!res.ok() || res.value <= 0) return std::nullopt;

  Int l = 1;
  for (Eigen::Index j = 0; j < nvars - 1; ++j) {
    Rat r = res.x(j);
    r.canonicalize();
    Int den = r.get_den();
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
  }
  CoherenceCertificate cert;
  cert.fn.resize(base.cones().size());
  cert.walls.resize(base.cones().size());
  for (size_t i = 0; i < base.cones().size(); ++i) {
    const Eigen::Index d = base.cones()[i].rank;
    for (size_t p = 0; p < fine.chart(i).max_cones().size(); ++p) {
      ZVec v(d);
      for (Eigen::Index k = 0; k < d; ++k) {
        Rat r = res.x(var_base[i][p] + k) * Rat(l);
        r.canonicalize();
        v(k) = r.get_num();
      }
      cert.fn[i].push_back(v);
    }
  }
  return cert;
}

FactorizationCertificate factor_2d(const MarkedComplex& base, const PLDatum& f) {
  if (base.cx.dim() > 2) throw Error("factor_2d: ambient dimension exceeds 2");
  if (!base.cx.is_smooth()) throw Error("factor_2d: base is not nonsingular");
  Subdivision s = subdivision_from_pl(base.cx, f);
  for (size_t i = 0; i < s.state.charts().size(); ++i)
    for (const auto& p : s.state.chart(i).max_cones())
      if (!is_smooth(p)) throw Error("factor_2d: total is not nonsingular");

  FactorizationCertificate cert;
  cert.base = base;
  cert.base.u_cones = u_subcomplex(base.cx, f, base.boundary_rays);
  cert.input = f;
  cert.source = s.state;
  cert.source_cert = certificate_from_datum(s.state, f);
  cert.strong = true;

  SubdivState trivial(base.cx);
  std::vector<StarPathStep> path = smooth_star_path(trivial, s.state);
  std::vector<BlowupStage> chain;
  SubdivState prev = trivial;
  for (const auto& ps : path) {
    chain.push_back(stage_of(prev, ps.centers, ps.result));
    FactorizationStep step;
    step.forward = true;
    step.centers = ps.centers;
    step.result = ps.result;
    step.j = compose_blowups(base.cx, chain);
    cert.steps.push_back(step);
    prev = ps.result;
  }
  return cert;
}

BarycentricReduction barycentric_reduction(const MarkedComplex& base, const SubdivState& source,
                                           int max_steps) {
  BarycentricReduction out;
  // front: two barycentric rounds on the source side
  SubdivState cur = source;
  for (int round = 0; round < 2; ++round) {
    auto steps = barycentric_rounds(cur, base.u_cones);
    for (auto& st : steps) {
      out.front.push_back(st);
      cur = st.result;
    }
  }
  // back: two barycentric rounds on the base itself
  SubdivState dp(base.cx);
  for (int round = 0; round < 2; ++round) {
    auto steps = barycentric_rounds(dp, base.u_cones);
    for (auto& st : steps) {
      out.back.push_back(st);
      dp = st.result;
    }
  }
  out.delta_prime = dp;

  // common refinement, resolved, reachable by smooth stars
  SubdivState common = cur.common_refinement(dp);
  desingularize_state(common, max_steps);
  common.validate();
  auto middle = smooth_star_path(cur, common, max_steps);
  for (auto& st : middle) {
    out.front.push_back(st);
    cur = st.result;
  }
  out.front_end = cur;

  // Delta' realized as an honest fan (full barycentric of the base)
  BarycentricResult b1 = barycentric_subdivision(base.cx);
  BarycentricResult b2 = barycentric_subdivision(b1.complex);
  out.delta_prime_fan = embed_barycentric_as_fan(b2);

  auto rc = certify_relative(out.delta_prime, out.front_end);
  if (!rc) throw Error("barycentric_reduction: residual subdivision is not coherent");
  out.residual_cert = *rc;
  return out;
}

std::vector<FactorizationStep> pi_desingularize(const SubdivState& coarse, const SubdivState& fine,
                                                const PiDesingPlugin& plugin) {
  if (fine == coarse) return {};
  if (coarse.base().dim() <= 2) {
    std::vector<FactorizationStep> out;
    for (const auto& ps : smooth_star_path(coarse, fine)) {
      FactorizationStep step;
      step.forward = true;
      step.centers = ps.centers;
      step.result = ps.result;
      out.push_back(step);
    }
    return out;
  }
  if (!plugin)
    throw NotImplementedError(
        "pi_desingularize: non-identity residual in ambient dimension >= 3 requires a plugin");
  std::vector<FactorizationStep> steps = plugin(coarse, fine);
  // gate the plugin output: recompose and check smoothness and coherence
  SubdivState cur = coarse;
  for (const auto& st : steps) {
    if (st.forward) {
      SubdivState next = cur;
      star_round(next, st.centers);
      if (!(next == st.result)) throw Error("pi_desingularize: plugin step does not recompose");
    } else {
      SubdivState prev = st.result;
      star_round(prev, st.centers);
      if (!(prev == cur)) throw Error("pi_desingularize: plugin inverse step does not recompose");
    }
    cur = st.result;
    for (size_t i = 0; i < cur.charts().size(); ++i)
      for (const auto& p : cur.chart(i).max_cones())
        if (!is_smooth(p)) throw Error("pi_desingularize: plugin stage is not nonsingular");
    if (!cur.refines(coarse))
      throw Error("pi_desingularize: plugin stage does not refine the residual base");
    if (!certify_relative(coarse, cur).has_value())
      throw Error("pi_desingularize: plugin stage is not projective over the residual base");
  }
  if (!(cur == fine)) throw Error("pi_desingularize: plugin does not reach the residual total");
  return steps;
}

namespace {

FactorizationCertificate assemble(const MarkedComplex& marked, const PLDatum& f,
                                  const Subdivision& s, const EngineOptions& opts) {
  FactorizationCertificate cert;
  cert.base = marked;
  cert.input = f;
  cert.source = s.state;
  cert.source_cert = certificate_from_datum(s.state, f);
  if (s.state.is_trivial()) {
    cert.strong = true;
    return cert;
  }
  if (marked.cx.dim() >= 3 && !opts.plugin)
    throw NotImplementedError(
        "pi_desingularize: non-identity residual in ambient dimension >= 3 requires a plugin");

  BarycentricReduction br = barycentric_reduction(marked, s.state, opts.max_steps);
  std::vector<FactorizationStep> core = pi_desingularize(br.delta_prime, br.front_end, opts.plugin);

  // phase A: the back rounds, forward from the trivial subdivision
  std::vector<BlowupStage> chain;
  SubdivState prev(marked.cx);
  for (const auto& ps : br.back) {
    chain.push_back(stage_of(prev, ps.centers, ps.result));
    FactorizationStep step;
    step.forward = true;
    step.centers = ps.centers;
    step.result = ps.result;
    step.j = compose_blowups(marked.cx, chain);
    cert.steps.push_back(step);
    prev = ps.result;
  }
  // phase B: the core (all forward in dimension <= 2; plugin zigzags pass
  // through their own recorded results)
  for (const auto& st : core) {
    if (st.forward) {
      chain.push_back(stage_of(prev, st.centers, st.result));
      FactorizationStep step = st;
      step.j = compose_blowups(marked.cx, chain);
      cert.steps.push_back(step);
      prev = st.result;
    } else {
      throw Error("weak_factorization: inverse plugin steps are not supported in assembly");
    }
  }
  if (!(prev == br.front_end)) throw Error("weak_factorization: core does not reach the residual");

  // phases C and D: undo the front sequence, with certificates built on the
  // source side of the chain
  std::vector<BlowupStage> source_chain;
  source_chain.push_back({s.state, certificate_from_datum(s.state, f).fn});
  std::vector<CoherenceCertificate> front_j;
  {
    SubdivState p2 = s.state;
    for (const auto& ps : br.front) {
      source_chain.push_back(stage_of(p2, ps.centers, ps.result));
      front_j.push_back(compose_blowups(marked.cx, source_chain));
      p2 = ps.result;
    }
  }
  for (size_t k = br.front.size(); k-- > 0;) {
    FactorizationStep step;
    step.forward = false;
    step.centers = br.front[k].centers;
    step.result = k == 0 ? s.state : br.front[k - 1].result;
    step.j = k == 0 ? cert.source_cert : front_j[k - 1];
    cert.steps.push_back(step);
  }
  cert.strong = false;
  return cert;
}

} // namespace

FactorizationCertificate weak_factorization(const MarkedComplex& base, const PLDatum& f,
                                            const EngineOptions& opts) {
  std::string why;
  if (!pl_compatible(base.cx, f, &why)) throw Error("weak_factorization: " + why);
  if (!base.cx.is_smooth()) throw Error("weak_factorization: base is not nonsingular");
  MarkedComplex marked = base;
  marked.u_cones = u_subcomplex(base.cx, f, base.boundary_rays);
  Subdivision s = subdivision_from_pl(base.cx, f);
  for (size_t i = 0; i < s.state.charts().size(); ++i)
    for (const auto& p : s.state.chart(i).max_cones())
      if (!is_smooth(p))
        throw Error("weak_factorization: the input subdivision is not nonsingular");
  return assemble(marked, f, s, opts);
}

FactorizationCertificate weak_factorization(const MarkedComplex& base, const MonomialIdeal& ideal,
                                            const EngineOptions& opts) {
  AffinePL pl = pl_from_ideal(ideal);
  if (!(base.cx == pl.complex))
    throw Error("weak_factorization: base complex does not match the ideal chart");
  return weak_factorization(base, pl.f, opts);
}

FactorizationCertificate functorial_factorization(const MarkedComplex& base, const PLDatum& f,
                                                  const EngineOptions& opts) {
  std::vector<int> labels(base.cx.cones().size(), 0);
  for (int b : base.boundary_rays) labels[static_cast<size_t>(b)] = 1;
  FinalObjectResult fo = final_object(base.cx, f, labels);
  MarkedComplex fin;
  fin.cx = fo.complex;
  for (size_t i = 0; i < base.cx.cones().size(); ++i)
    if (labels[i]) fin.boundary_rays.push_back(fo.g.cone_to[i]);
  std::sort(fin.boundary_rays.begin(), fin.boundary_rays.end());
  fin.boundary_rays.erase(std::unique(fin.boundary_rays.begin(), fin.boundary_rays.end()),
                          fin.boundary_rays.end());
  fin.u_cones = u_subcomplex(fin.cx, fo.f, fin.boundary_rays);
  FactorizationCertificate hub = weak_factorization(fin, fo.f, opts);
  return pullback_factorization(base, fin.cx, fo.g, hub);
}

FactorizationCertificate pullback_factorization(const MarkedComplex& src_base,
                                                const GenComplex& dst,
                                                const ComplexMorphism& phi,
                                                const FactorizationCertificate& cert) {
  std::string why;
  if (!morphism_valid(src_base.cx, dst, phi, true, &why))
    throw Error("pullback_factorization: not a face map: " + why);

  auto pull_state = [&](const SubdivState& st) {
    return pullback_subdivision(src_base.cx, dst, phi, st);
  };
  auto pull_cert = [&](const SubdivState& dst_state, const CoherenceCertificate& c,
                       const SubdivState& src_state) {
    CoherenceCertificate out;
    out.fn.resize(src_base.cx.cones().size());
    out.walls.resize(src_base.cx.cones().size());
    for (size_t a = 0; a < src_base.cx.cones().size(); ++a) {
      int t = phi.cone_to[a];
      const ZMat& m = phi.mats[a];
      const Fan& tchart = dst_state.chart(static_cast<size_t>(t));
      for (const auto& piece : src_state.chart(a).max_cones()) {
        std::vector<ZVec> image;
        for (const auto& r : piece.rays) image.push_back(primitive(ZVec(m * r)));
        int q = -1;
        for (size_t j = 0; j < tchart.max_cones().size(); ++j) {
          bool all = true;
          for (const auto& r : image)
            if (!contains(tchart.max_cones()[j], r, Strictness::Boundary)) {
              all = false;
              break;
            }
          if (all) {
            q = static_cast<int>(j);
            break;
          }
        }
        if (q < 0) throw Error("pullback_factorization: piece image not found");
        out.fn[a].push_back(m.transpose() * c.fn[static_cast<size_t>(t)][static_cast<size_t>(q)]);
      }
    }
    return out;
  };
  auto pull_centers = [&](const CenterSet& cs) {
    CenterSet out;
    out.per_chart.resize(src_base.cx.cones().size());
    for (size_t a = 0; a < src_base.cx.cones().size(); ++a) {
      int t = phi.cone_to[a];
      const ZMat& m = phi.mats[a];
      const Cone& ta = src_base.cx.cones()[a];
      std::vector<ZVec> image;
      for (const auto& r : ta.rays) image.push_back(primitive(ZVec(m * r)));
      Cone img = make_cone(dst.cones()[static_cast<size_t>(t)].rank, image);
      QMat mq = to_q(m);
      for (const auto& c : cs.per_chart[static_cast<size_t>(t)]) {
        bool inside = true;
        for (const auto& r : c.face.rays)
          if (!contains(img, r, Strictness::Boundary)) {
            inside = false;
            break;
          }
        if (!inside) continue;
        std::vector<ZVec> back;
        for (const auto& r : c.face.rays) {
          auto x = solve(mq, to_q(r));
          if (!x) throw Error("pullback_factorization: center transport failed");
          back.push_back(clear_denominators(*x));
        }
        auto pt = solve(mq, to_q(c.point));
        if (!pt) throw Error("pullback_factorization: center point transport failed");
        out.per_chart[a].push_back(
            {make_cone(ta.rank, back), primitive(clear_denominators(*pt))});
      }
    }
    return out;
  };

  FactorizationCertificate out;
  out.base = src_base;
  out.input = pullback_pl(src_base.cx, dst, phi, cert.input);
  out.base.u_cones = u_subcomplex(src_base.cx, out.input, src_base.boundary_rays);
  out.source = pull_state(cert.source);
  out.source_cert = pull_cert(cert.source, cert.source_cert, out.source);
  out.strong = cert.strong;
  for (const auto& st : cert.steps) {
    FactorizationStep step;
    step.forward = st.forward;
    step.result = pull_state(st.result);
    step.centers = pull_centers(st.centers);
    step.j = pull_cert(st.result, st.j, step.result);
    out.steps.push_back(step);
  }
  return out;
}

bool certificates_equal(const FactorizationCertificate& a, const FactorizationCertificate& b,
                        std::string* why) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  if (!(a.base.cx == b.base.cx)) return fail("base complexes differ");
  if (a.base.u_cones != b.base.u_cones) return fail("U subcomplexes differ");
  if (a.base.boundary_rays != b.base.boundary_rays) return fail("boundary markings differ");
  if (a.input.fn.size() != b.input.fn.size()) return fail("input data differ");
  for (size_t i = 0; i < a.input.fn.size(); ++i)
    if (!ray_list_equal(a.input.fn[i], b.input.fn[i])) return fail("input data differ");
  if (!(a.source == b.source)) return fail("source subdivisions differ");
  if (a.steps.size() != b.steps.size()) return fail("step counts differ");
  auto fn_equal = [](const CoherenceCertificate& x, const CoherenceCertificate& y) {
    if (x.fn.size() != y.fn.size()) return false;
    for (size_t i = 0; i < x.fn.size(); ++i)
      if (!ray_list_equal(x.fn[i], y.fn[i])) return false;
    return true;
  };
  if (!fn_equal(a.source_cert, b.source_cert)) return fail("source certificates differ");
  for (size_t k = 0; k < a.steps.size(); ++k) {
    const auto& sa = a.steps[k];
    const auto& sb = b.steps[k];
    if (sa.forward != sb.forward) return fail("step " + std::to_string(k) + ": direction differs");
    if (!(sa.result == sb.result)) return fail("step " + std::to_string(k) + ": results differ");
    if (!fn_equal(sa.j, sb.j)) return fail("step " + std::to_string(k) + ": J certificates differ");
    // centers as sorted key sets
    auto keys = [](const CenterSet& cs) {
      std::vector<std::string> out;
      for (size_t i = 0; i < cs.per_chart.size(); ++i)
        for (const auto& c : cs.per_chart[i]) out.push_back(std::to_string(i) + "#" + c.key());
      std::sort(out.begin(), out.end());
      return out;
    };
    if (keys(sa.centers) != keys(sb.centers))
      return fail("step " + std::to_string(k) + ": centers differ");
  }
  return true;
}

} // namespace toricfact
