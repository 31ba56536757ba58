#include "toricfact/fan.hpp"

#include <map>
#include <set>
#include <sstream>

namespace toricfact {

namespace {

void sort_cones(std::vector<Cone>& cs) {
  std::sort(cs.begin(), cs.end(), [](const Cone& a, const Cone& b) {
    Eigen::Index da = a.dim(), db = b.dim();
    if (da != db) return da < db;
    return encode(a.rays) < encode(b.rays);
  });
  cs.erase(std::unique(cs.begin(), cs.end(), [](const Cone& a, const Cone& b) { return a == b; }),
           cs.end());
}

} // namespace

Fan::Fan(Eigen::Index ambient, std::vector<Cone> max_cones, bool validate)
    : ambient_(ambient), max_(std::move(max_cones)) {
  for (auto& c : max_) {
    if (c.rank != ambient_) throw Error("Fan: ambient rank mismatch");
    sort_rays(c.rays);
  }
  sort_cones(max_);
  // Drop cones that are faces of others.
  std::vector<Cone> kept;
  for (size_t i = 0; i < max_.size(); ++i) {
    bool dominated = false;
    for (size_t j = 0; j < max_.size() && !dominated; ++j) {
      if (i == j) continue;
      if (max_[i].rays.size() <= max_[j].rays.size() && is_face_of(max_[j], max_[i].rays) &&
          !(max_[j] == max_[i]))
        dominated = true;
    }
    if (!dominated) kept.push_back(max_[i]);
  }
  max_ = kept;
  if (validate) validate_fan();
}

void Fan::validate_fan() const {
  for (size_t i = 0; i < max_.size(); ++i)
    for (size_t j = i + 1; j < max_.size(); ++j) {
      Cone inter = intersect_cones(max_[i], max_[j]);
      if (!is_face_of(max_[i], inter.rays) || !is_face_of(max_[j], inter.rays))
        throw Error("Fan: maximal cones do not meet in a common face");
    }
}

std::vector<Cone> Fan::all_cones() const {
  std::vector<Cone> out;
  for (const auto& c : max_)
    for (const auto& f : faces(c)) out.push_back(f);
  sort_cones(out);
  return out;
}

std::vector<ZVec> Fan::rays() const {
  std::vector<ZVec> out;
  std::set<std::string> seen;
  for (const auto& c : max_)
    for (const auto& r : c.rays)
      if (seen.insert(to_string(r)).second) out.push_back(r);
  sort_rays(out);
  return out;
}

bool Fan::is_smooth() const {
  for (const auto& c : max_)
    if (!toricfact::is_smooth(c)) return false;
  return true;
}

Fan Fan::star_subdivide(const ZVec& w) const {
  ZVec p = primitive(w);
  std::vector<Cone> out;
  for (const auto& c : max_) {
    if (!contains(c, p, Strictness::Boundary)) {
      out.push_back(c);
      continue;
    }
    bool split = false;
    for (const auto& f : faces(c)) {
      if (contains(f, p, Strictness::Boundary)) continue;
      std::vector<ZVec> gens = f.rays;
      gens.push_back(p);
      Cone piece = make_cone(ambient_, gens);
      if (piece.dim() == c.dim()) {
        out.push_back(piece);
        split = true;
      }
    }
    if (!split) out.push_back(c); // w spans an existing ray of a simplicial cone
  }
  return Fan(ambient_, out);
}

bool Fan::refines(const Fan& other) const {
  for (const auto& c : max_) {
    bool inside = false;
    for (const auto& d : other.max_cones()) {
      bool all = true;
      for (const auto& r : c.rays)
        if (!contains(d, r, Strictness::Boundary)) {
          all = false;
          break;
        }
      if (all) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

Fan Fan::common_refinement(const Fan& other) const {
  std::vector<Cone> pieces;
  for (const auto& a : max_)
    for (const auto& b : other.max_cones()) {
      Cone i = intersect_cones(a, b);
      if (i.dim() == a.dim()) pieces.push_back(i);
    }
  return Fan(ambient_, pieces);
}

const Cone* Fan::max_cone_containing(const ZVec& v) const {
  for (const auto& c : max_)
    if (contains(c, v, Strictness::Boundary)) return &c;
  return nullptr;
}

bool Fan::operator==(const Fan& o) const {
  if (ambient_ != o.ambient_ || max_.size() != o.max_.size()) return false;
  for (size_t i = 0; i < max_.size(); ++i)
    if (!(max_[i] == o.max_[i])) return false;
  return true;
}

std::string Fan::key() const {
  std::ostringstream os;
  os << ambient_ << "#";
  for (const auto& c : max_) os << encode(c.rays) << ";";
  return os.str();
}

Fan fan_of_cone(const Cone& c) { return Fan(c.rank, {c}); }

Rat simplex_volume(const Cone& c, const ZVec& pos) {
  if (!c.is_simplicial() || c.dim() != c.rank) throw Error("simplex_volume: need full-dim simplicial cone");
  QMat m = to_q(c.ray_matrix());
  // normalize each ray to pairing 1 with pos and take |det| / d!
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Rat s = Rat(pos.dot(c.rays[static_cast<size_t>(j)]));
    if (s <= 0) throw Error("simplex_volume: functional not positive on a ray");
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) /= s;
  }
  // exact determinant by elimination
  Rat det = 1;
  const Eigen::Index n = m.rows();
  for (Eigen::Index c2 = 0; c2 < n; ++c2) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = c2; i < n; ++i)
      if (m(i, c2) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return Rat(0);
    if (piv != c2) {
      m.row(piv).swap(m.row(c2));
      det = -det;
    }
    det *= m(c2, c2);
    for (Eigen::Index i = c2 + 1; i < n; ++i) {
      if (m(i, c2) == 0) continue;
      Rat f = m(i, c2) / m(c2, c2);
      m.row(i) -= f * m.row(c2);
    }
  }
  Rat v = abs(det);
  Rat fact = 1;
  for (Eigen::Index i = 2; i <= n; ++i) fact *= Rat(i);
  return v / fact;
}

ZVec positive_functional(const Cone& c) {
  ZVec pos = ZVec::Zero(c.rank);
  for (const auto& f : facet_normals(c)) pos += f;
  return pos;
}

bool partition_check(const Cone& support, const std::vector<Cone>& pieces) {
  ZVec pos = positive_functional(support);
  Rat total = 0;
  for (const auto& p : pieces) total += simplex_volume(p, pos);
  return total == simplex_volume(support, pos);
}

Fan desingularize(const Fan& f, std::vector<DesingStep>* record, int max_steps) {
  Fan cur = f;
  for (int step = 0; step < max_steps; ++step) {
    // minimal-dimension non-smooth cone, ties lexicographic
    Cone bad;
    bool found = false;
    for (const auto& c : cur.all_cones()) {
      if (toricfact::is_smooth(c)) continue;
      if (!found || c.dim() < bad.dim() ||
          (c.dim() == bad.dim() && encode(c.rays) < encode(bad.rays))) {
        bad = c;
        found = true;
      }
    }
    if (!found) return cur;

    // Candidate centers: lattice points of the fundamental region for
    // simplicial cones; rays and interior box points for non-simplicial ones.
    std::vector<ZVec> candidates;
    ZVec boxmax = ZVec::Zero(bad.rank);
    ZVec boxmin = ZVec::Zero(bad.rank);
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
        if (!fundamental) continue;
        candidates.push_back(primitive(p));
      } else {
        if (!contains(bad, p, Strictness::Boundary)) continue;
        candidates.push_back(primitive(p));
      }
    }
    if (!bad.is_simplicial())
      for (const auto& r : bad.rays) candidates.push_back(r);

    std::sort(candidates.begin(), candidates.end(), [](const ZVec& a, const ZVec& b) {
      Int la = a.dot(a), lb = b.dot(b);
      if (la != lb) return la < lb;
      return lex_less(a, b);
    });
    candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                 [](const ZVec& a, const ZVec& b) { return lex_compare(a, b) == 0; }),
                     candidates.end());
    bool progressed = false;
    for (const auto& w : candidates) {
      Fan next = cur.star_subdivide(w);
      if (!(next == cur)) {
        if (record) record->push_back({w});
        cur = next;
        progressed = true;
        break;
      }
    }
    if (!progressed) throw Error("desingularize: no progressing center found");
  }
  throw Error("desingularize: step bound exceeded");
}

Rat fan_pl_value(const Fan& f, const FanPL& pl, const ZVec& v) {
  for (size_t i = 0; i < f.max_cones().size(); ++i) {
    if (!contains(f.max_cones()[i], v, Strictness::Boundary)) continue;
    const auto& fns = pl.fn[i];
    if (fns.empty()) throw Error("fan_pl_value: empty functional list");
    Rat best;
    bool first = true;
    for (const auto& l : fns) {
      Rat x = Rat(l.dot(v));
      if (first || x < best) {
        best = x;
        first = false;
      }
    }
    return best;
  }
  throw Error("fan_pl_value: point outside support");
}

Fan regions_of_linearity(const Fan& f, const FanPL& pl) {
  if (pl.fn.size() != f.max_cones().size()) throw Error("regions_of_linearity: size mismatch");
  std::vector<Cone> pieces;
  for (size_t i = 0; i < f.max_cones().size(); ++i) {
    const Cone& c = f.max_cones()[i];
    std::vector<ZVec> fns;
    {
      std::set<std::string> seen;
      for (const auto& l : pl.fn[i])
        if (seen.insert(to_string(l)).second) fns.push_back(l);
    }
    for (size_t a = 0; a < fns.size(); ++a) {
      std::vector<ZVec> hs = facet_normals(c);
      for (size_t b = 0; b < fns.size(); ++b) {
        if (a == b) continue;
        hs.push_back(fns[b] - fns[a]);
      }
      std::vector<ZVec> lin;
      for (Eigen::Index k = 0; k < c.rank; ++k) {
        ZVec e = ZVec::Zero(c.rank);
        e(k) = 1;
        lin.push_back(e);
      }
      DDResult dd = dual_description(lin, hs);
      if (dd.rays.empty()) continue;
      Cone piece = make_cone(c.rank, dd.rays);
      if (piece.dim() == c.dim()) pieces.push_back(piece);
    }
  }
  return Fan(f.ambient(), pieces);
}

std::vector<ZVec> restrict_pl(const Fan& coarse, const FanPL& pl, const Fan& fine) {
  std::vector<ZVec> out;
  for (const auto& piece : fine.max_cones()) {
    ZVec z = ZVec::Zero(fine.ambient());
    for (const auto& r : piece.rays) z += r;
    const Cone* host = nullptr;
    size_t hi = 0;
    for (size_t i = 0; i < coarse.max_cones().size(); ++i)
      if (contains(coarse.max_cones()[i], z, Strictness::Boundary)) {
        host = &coarse.max_cones()[i];
        hi = i;
        break;
      }
    if (!host) throw Error("restrict_pl: piece outside coarse fan");
    const auto& fns = pl.fn[hi];
    const ZVec* best = nullptr;
    for (const auto& l : fns) {
      bool attains = true;
      for (const auto& other : fns) {
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
    if (!best) throw Error("restrict_pl: piece is not a domain of linearity");
    out.push_back(*best);
  }
  return out;
}

} // namespace toricfact
