#include "toricfact/io.hpp"

#include <set>
#include <sstream>

namespace toricfact {

namespace {

Int int_from_json(const Json& j) {
  if (!j.is_string()) throw Error("expected an integer encoded as a decimal string");
  return Int(j.get<std::string>());
}

Json json_of_int(const Int& v) { return Json(v.get_str()); }

} // namespace

Json to_json(const ZVec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(json_of_int(v(i)));
  return a;
}

ZVec zvec_from_json(const Json& j) {
  if (!j.is_array()) throw Error("expected an array for a lattice vector");
  ZVec v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = int_from_json(j[i]);
  return v;
}

Json to_json(const ZMat& m) {
  Json o;
  o["rows"] = static_cast<int>(m.rows());
  o["cols"] = static_cast<int>(m.cols());
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json_of_int(m(i, j)));
    data.push_back(row);
  }
  o["data"] = data;
  return o;
}

ZMat zmat_from_json(const Json& j) {
  int rows = j.at("rows").get<int>();
  int cols = j.at("cols").get<int>();
  if (rows < 0 || cols < 0) throw Error("negative matrix dimensions");
  ZMat m(rows, cols);
  const Json& data = j.at("data");
  if (static_cast<int>(data.size()) != rows) throw Error("matrix row count mismatch");
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(data[static_cast<size_t>(i)].size()) != cols)
      throw Error("matrix column count mismatch");
    for (int c = 0; c < cols; ++c)
      m(i, c) = int_from_json(data[static_cast<size_t>(i)][static_cast<size_t>(c)]);
  }
  return m;
}

Json to_json(const Cone& c) {
  Json o;
  o["rank"] = static_cast<int>(c.rank);
  Json rays = Json::array();
  for (const auto& r : c.rays) rays.push_back(to_json(r));
  o["rays"] = rays;
  return o;
}

Cone cone_from_json(const Json& j) {
  Eigen::Index rank = j.at("rank").get<int>();
  std::vector<ZVec> rays;
  for (const auto& r : j.at("rays")) rays.push_back(zvec_from_json(r));
  return make_cone(rank, rays);
}

Json to_json(const Fan& f) {
  Json o;
  o["ambient"] = static_cast<int>(f.ambient());
  Json cones = Json::array();
  for (const auto& c : f.max_cones()) {
    Json rays = Json::array();
    for (const auto& r : c.rays) rays.push_back(to_json(r));
    cones.push_back(rays);
  }
  o["max_cones"] = cones;
  return o;
}

Fan fan_from_json(const Json& j) {
  Eigen::Index ambient = j.at("ambient").get<int>();
  std::vector<Cone> cones;
  for (const auto& cj : j.at("max_cones")) {
    std::vector<ZVec> rays;
    for (const auto& r : cj) rays.push_back(zvec_from_json(r));
    cones.push_back(make_cone(ambient, rays));
  }
  return Fan(ambient, cones);
}

Json to_json(const GenComplex& cx) {
  Json o;
  Json cones = Json::array();
  for (const auto& c : cx.cones()) cones.push_back(to_json(c));
  o["cones"] = cones;
  Json maps = Json::array();
  for (const auto& m : cx.maps()) {
    Json mo;
    mo["src"] = m.src;
    mo["dst"] = m.dst;
    mo["matrix"] = to_json(m.mat);
    maps.push_back(mo);
  }
  o["maps"] = maps;
  return o;
}

GenComplex complex_from_json(const Json& j) {
  std::vector<Cone> cones;
  for (const auto& c : j.at("cones")) cones.push_back(cone_from_json(c));
  std::vector<FaceMapRec> maps;
  for (const auto& m : j.at("maps"))
    maps.push_back({m.at("src").get<int>(), m.at("dst").get<int>(), zmat_from_json(m.at("matrix"))});
  return GenComplex::build(cones, maps, false);
}

Json to_json(const MarkedComplex& m) {
  Json o = to_json(m.cx);
  o["u_cones"] = m.u_cones;
  o["boundary_rays"] = m.boundary_rays;
  return o;
}

MarkedComplex marked_from_json(const Json& j) {
  MarkedComplex m;
  m.cx = complex_from_json(j);
  if (j.contains("u_cones")) m.u_cones = j.at("u_cones").get<std::vector<int>>();
  if (j.contains("boundary_rays")) m.boundary_rays = j.at("boundary_rays").get<std::vector<int>>();
  return m;
}

Json to_json(const PLDatum& f) {
  Json a = Json::array();
  for (const auto& per : f.fn) {
    Json l = Json::array();
    for (const auto& v : per) l.push_back(to_json(v));
    a.push_back(l);
  }
  return a;
}

PLDatum pl_from_json(const Json& j) {
  PLDatum f;
  for (const auto& per : j) {
    std::vector<ZVec> fns;
    for (const auto& v : per) fns.push_back(zvec_from_json(v));
    f.fn.push_back(fns);
  }
  return f;
}

Json to_json(const SubdivState& s) {
  Json a = Json::array();
  for (size_t i = 0; i < s.charts().size(); ++i) {
    Json cones = Json::array();
    for (const auto& c : s.chart(i).max_cones()) {
      Json rays = Json::array();
      for (const auto& r : c.rays) rays.push_back(to_json(r));
      cones.push_back(rays);
    }
    a.push_back(cones);
  }
  return a;
}

SubdivState subdiv_from_json(const Json& j, const GenComplex& base) {
  SubdivState s(base);
  if (j.size() != base.cones().size()) throw Error("subdivision chart count mismatch");
  for (size_t i = 0; i < j.size(); ++i) {
    std::vector<Cone> cones;
    for (const auto& cj : j[i]) {
      std::vector<ZVec> rays;
      for (const auto& r : cj) rays.push_back(zvec_from_json(r));
      cones.push_back(make_cone(base.cones()[i].rank, rays));
    }
    s.chart(i) = Fan(base.cones()[i].rank, cones);
  }
  s.validate();
  return s;
}

Json to_json(const MonomialIdeal& i) {
  Json o;
  o["chart"] = to_json(i.chart);
  Json gens = Json::array();
  for (const auto& g : i.gens) gens.push_back(to_json(g));
  o["generators"] = gens;
  return o;
}

MonomialIdeal ideal_from_json(const Json& j) {
  Cone chart = cone_from_json(j.at("chart"));
  std::vector<ZVec> gens;
  for (const auto& g : j.at("generators")) gens.push_back(zvec_from_json(g));
  return make_ideal(chart, gens);
}

Json to_json(const CoherenceCertificate& c) {
  Json o;
  Json fn = Json::array();
  for (const auto& per : c.fn) {
    Json l = Json::array();
    for (const auto& v : per) l.push_back(to_json(v));
    fn.push_back(l);
  }
  o["fn"] = fn;
  Json walls = Json::array();
  for (const auto& per : c.walls) {
    Json wl = Json::array();
    for (const auto& w : per) {
      Json wo;
      wo["a"] = w.piece_a;
      wo["b"] = w.piece_b;
      wo["margin_num"] = json_of_int(w.margin.get_num());
      wo["margin_den"] = json_of_int(w.margin.get_den());
      wl.push_back(wo);
    }
    walls.push_back(wl);
  }
  o["walls"] = walls;
  return o;
}

CoherenceCertificate cert_from_json(const Json& j) {
  CoherenceCertificate c;
  for (const auto& per : j.at("fn")) {
    std::vector<ZVec> fns;
    for (const auto& v : per) fns.push_back(zvec_from_json(v));
    c.fn.push_back(fns);
  }
  if (j.contains("walls")) {
    for (const auto& per : j.at("walls")) {
      std::vector<CoherenceCertificate::Wall> ws;
      for (const auto& w : per) {
        CoherenceCertificate::Wall wall;
        wall.piece_a = w.at("a").get<int>();
        wall.piece_b = w.at("b").get<int>();
        wall.margin = Rat(int_from_json(w.at("margin_num")), int_from_json(w.at("margin_den")));
        ws.push_back(wall);
      }
      c.walls.push_back(ws);
    }
  }
  return c;
}

Json to_json(const CenterSet& c) {
  Json a = Json::array();
  for (const auto& per : c.per_chart) {
    Json l = Json::array();
    for (const auto& ctr : per) {
      Json co;
      Json rays = Json::array();
      for (const auto& r : ctr.face.rays) rays.push_back(to_json(r));
      co["face"] = rays;
      co["point"] = to_json(ctr.point);
      l.push_back(co);
    }
    a.push_back(l);
  }
  return a;
}

CenterSet centers_from_json(const Json& j, Eigen::Index nchart_rank_unused) {
  (void)nchart_rank_unused;
  CenterSet c;
  for (const auto& per : j) {
    std::vector<CenterRef> refs;
    for (const auto& co : per) {
      std::vector<ZVec> rays;
      for (const auto& r : co.at("face")) rays.push_back(zvec_from_json(r));
      ZVec pt = zvec_from_json(co.at("point"));
      refs.push_back({make_cone(pt.size(), rays), pt});
    }
    c.per_chart.push_back(refs);
  }
  return c;
}

Json to_json(const FactorizationCertificate& c) {
  Json o;
  o["base"] = to_json(c.base);
  o["input"] = to_json(c.input);
  o["source"] = to_json(c.source);
  o["source_cert"] = to_json(c.source_cert);
  o["strong"] = c.strong;
  Json steps = Json::array();
  for (const auto& st : c.steps) {
    Json so;
    so["forward"] = st.forward;
    so["centers"] = to_json(st.centers);
    so["result"] = to_json(st.result);
    so["j"] = to_json(st.j);
    steps.push_back(so);
  }
  o["steps"] = steps;
  return o;
}

FactorizationCertificate factorization_from_json(const Json& j) {
  FactorizationCertificate c;
  c.base = marked_from_json(j.at("base"));
  c.input = pl_from_json(j.at("input"));
  c.source = subdiv_from_json(j.at("source"), c.base.cx);
  c.source_cert = cert_from_json(j.at("source_cert"));
  c.strong = j.at("strong").get<bool>();
  for (const auto& so : j.at("steps")) {
    FactorizationStep st;
    st.forward = so.at("forward").get<bool>();
    st.centers = centers_from_json(so.at("centers"), 0);
    st.result = subdiv_from_json(so.at("result"), c.base.cx);
    st.j = cert_from_json(so.at("j"));
    c.steps.push_back(st);
  }
  return c;
}

Json to_json(const VerificationReport& r) {
  Json o;
  o["pass"] = r.pass;
  Json conds = Json::array();
  for (const auto& c : r.conditions) {
    Json co;
    co["name"] = c.name;
    co["pass"] = c.pass;
    co["witness"] = c.witness;
    conds.push_back(co);
  }
  o["conditions"] = conds;
  return o;
}

VerificationReport report_from_json(const Json& j) {
  VerificationReport r;
  r.pass = j.at("pass").get<bool>();
  for (const auto& co : j.at("conditions"))
    r.conditions.push_back(
        {co.at("name").get<std::string>(), co.at("pass").get<bool>(), co.at("witness").get<std::string>()});
  return r;
}

Json to_json(const CobordismFan& b) {
  Json o;
  o["base"] = to_json(b.base);
  o["ideal"] = to_json(b.ideal);
  o["sigma_o"] = to_json(b.sigma_o);
  o["intermediate"] = to_json(b.intermediate);
  o["total"] = to_json(b.total);
  Json ds = Json::array();
  for (const auto& d : b.desing) ds.push_back(to_json(d.center));
  o["desing"] = ds;
  o["cocharacter"] = to_json(b.cocharacter);
  Json h = Json::array();
  for (const auto& l : b.h) h.push_back(to_json(l));
  o["h"] = h;
  o["twist"] = json_of_int(b.twist);
  o["d"] = json_of_int(b.d);
  o["veronese"] = b.veronese;
  return o;
}

CobordismFan cobordism_from_json(const Json& j) {
  CobordismFan b;
  b.base = cone_from_json(j.at("base"));
  b.ideal = ideal_from_json(j.at("ideal"));
  b.sigma_o = fan_from_json(j.at("sigma_o"));
  b.intermediate = fan_from_json(j.at("intermediate"));
  b.total = fan_from_json(j.at("total"));
  for (const auto& d : j.at("desing")) b.desing.push_back({zvec_from_json(d)});
  b.cocharacter = zvec_from_json(j.at("cocharacter"));
  for (const auto& l : j.at("h")) b.h.push_back(zvec_from_json(l));
  b.twist = int_from_json(j.at("twist"));
  b.d = int_from_json(j.at("d"));
  b.veronese = j.at("veronese").get<int>();
  return b;
}

Json to_json(const ComplexMorphism& m) {
  Json o;
  o["cone_to"] = m.cone_to;
  Json mats = Json::array();
  for (const auto& mm : m.mats) mats.push_back(to_json(mm));
  o["mats"] = mats;
  return o;
}

ComplexMorphism morphism_from_json(const Json& j) {
  ComplexMorphism m;
  m.cone_to = j.at("cone_to").get<std::vector<int>>();
  for (const auto& mm : j.at("mats")) m.mats.push_back(zmat_from_json(mm));
  return m;
}

std::string print_document(const Document& d) {
  Json o;
  o["format"] = kFormatTag;
  o["kind"] = d.kind;
  o["payload"] = d.payload;
  return o.dump(2) + "\n";
}

Document parse_document(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // map the byte offset to line and column
    size_t line = 1, col = 1;
    for (size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error("parse error at line " + std::to_string(line) + ", column " +
                std::to_string(col) + ": " + e.what());
  }
  try {
    Document d;
    if (j.at("format").get<std::string>() != kFormatTag)
      throw Error("unsupported format tag (expected " + std::string(kFormatTag) + ")");
    d.kind = j.at("kind").get<std::string>();
    static const std::set<std::string> kinds = {"complex",   "ideal",       "pl",    "subdivision",
                                                "cobordism", "certificate", "report"};
    if (!kinds.count(d.kind)) throw Error("unknown document kind: " + d.kind);
    d.payload = j.at("payload");
    return d;
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed document: ") + e.what());
  }
}

Document document_of_complex(const MarkedComplex& m) { return {"complex", to_json(m)}; }
Document document_of_ideal(const MonomialIdeal& i) { return {"ideal", to_json(i)}; }

Document document_of_pl(const MarkedComplex& m, const PLDatum& f) {
  Json o;
  o["complex"] = to_json(m);
  o["fn"] = to_json(f);
  return {"pl", o};
}

Document document_of_subdivision(const MarkedComplex& m, const SubdivState& s) {
  Json o;
  o["complex"] = to_json(m);
  o["charts"] = to_json(s);
  return {"subdivision", o};
}

Document document_of_cobordism(const CobordismFan& b) { return {"cobordism", to_json(b)}; }
Document document_of_certificate(const FactorizationCertificate& c) {
  return {"certificate", to_json(c)};
}
Document document_of_report(const VerificationReport& r) { return {"report", to_json(r)}; }

PLInput load_pl_input(const Document& d) {
  PLInput in;
  if (d.kind == "ideal") {
    MonomialIdeal ideal = ideal_from_json(d.payload);
    AffinePL pl = pl_from_ideal(ideal);
    in.base.cx = pl.complex;
    in.f = pl.f;
    return in;
  }
  if (d.kind == "pl") {
    in.base = marked_from_json(d.payload.at("complex"));
    in.f = pl_from_json(d.payload.at("fn"));
    std::string why;
    if (!pl_compatible(in.base.cx, in.f, &why)) throw Error("invalid pl document: " + why);
    return in;
  }
  throw Error("expected an ideal or pl document, got kind " + d.kind);
}

} // namespace toricfact
