// Command-line surface: factorization, cobordism, wall/chamber and quotient
// computations with machine-readable documents on stdout and logs on stderr.
//
// Exit codes: 0 pass, 1 usage or parse error, 2 verification failure or
// computational error, 3 unimplemented extension point.

#include "toricfact/io.hpp"

#include <CLI11.hpp>

#include <dlfcn.h>
#include <fstream>
#include <future>
#include <iostream>

using namespace toricfact;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << text;
}

Document load(const std::string& path) { return parse_document(slurp(path)); }

// plugin ABI: const char* toricfact_pi_desingularize(const char* request_json)
// returning a JSON array of steps (or null); ownership stays with the plugin
PiDesingPlugin load_plugin(const std::string& path) {
  void* handle = dlopen(path.c_str(), RTLD_NOW);
  if (!handle) throw Error(std::string("cannot load plugin: ") + dlerror());
  using Fn = const char* (*)(const char*);
  Fn fn = reinterpret_cast<Fn>(dlsym(handle, "toricfact_pi_desingularize"));
  if (!fn) throw Error("plugin does not export toricfact_pi_desingularize");
  return [fn](const SubdivState& coarse, const SubdivState& fine) {
    Json req;
    req["base"] = to_json(coarse.base());
    req["coarse"] = to_json(coarse);
    req["fine"] = to_json(fine);
    std::string request = req.dump();
    const char* reply = fn(request.c_str());
    if (!reply) throw NotImplementedError("pi_desingularize: plugin declined the residual");
    Json steps = Json::parse(reply);
    std::vector<FactorizationStep> out;
    for (const auto& so : steps) {
      FactorizationStep st;
      st.forward = so.at("forward").get<bool>();
      st.centers = centers_from_json(so.at("centers"), 0);
      st.result = subdiv_from_json(so.at("result"), coarse.base());
      out.push_back(st);
    }
    return out;
  };
}

int run_factorize(const std::string& input, const std::string& out_path, bool non_functorial,
                  int max_steps, const std::string& plugin_path) {
  PLInput in = load_pl_input(load(input));
  EngineOptions opts;
  opts.max_steps = max_steps;
  if (!plugin_path.empty()) opts.plugin = load_plugin(plugin_path);
  FactorizationCertificate cert = non_functorial ? weak_factorization(in.base, in.f, opts)
                                                 : functorial_factorization(in.base, in.f, opts);
  VerificationReport rep = check_weak_factorization(cert);
  std::string cert_text = print_document(document_of_certificate(cert));
  if (!out_path.empty()) {
    spit(out_path, cert_text);
    std::cerr << "certificate written to " << out_path << "\n";
  } else {
    std::string derived = input + ".cert.json";
    spit(derived, cert_text);
    std::cerr << "certificate written to " << derived << "\n";
  }
  std::cout << print_document(document_of_report(rep));
  return rep.pass ? 0 : 2;
}

int run_cobordism(const std::string& input, bool veronese_off) {
  Document d = load(input);
  if (d.kind != "ideal") throw Error("cobordism expects an ideal document");
  MonomialIdeal ideal = ideal_from_json(d.payload);
  CobordismFan b = build_cobordism(ideal, !veronese_off);
  std::cout << print_document(document_of_cobordism(b));
  return 0;
}

int run_walls(const std::string& input, bool veronese_off) {
  Document d = load(input);
  if (d.kind != "ideal") throw Error("walls expects an ideal document");
  MonomialIdeal ideal = ideal_from_json(d.payload);
  CobordismFan b = build_cobordism(ideal, !veronese_off);
  WeightTable wt = weight_intervals(b);
  WallChamberData wc = walls(b, wt);
  Json o;
  o["a_min"] = wt.a_min.get_str();
  o["a_max"] = wt.a_max.get_str();
  Json ws = Json::array();
  for (const auto& w : wc.walls) ws.push_back(w.get_str());
  o["walls"] = ws;
  if (veronese_off) {
    bool separated = true;
    for (size_t i = 0; i + 1 < wc.walls.size(); ++i)
      if (wc.walls[i] + 1 >= wc.walls[i + 1]) separated = false;
    o["separation_assumption_holds"] = separated;
  }
  std::cout << print_document({"report", o});
  return 0;
}

int run_quotients(const std::string& input, bool veronese_off, long chamber) {
  Document d = load(input);
  if (d.kind != "ideal") throw Error("quotients expects an ideal document");
  MonomialIdeal ideal = ideal_from_json(d.payload);
  CobordismFan b = build_cobordism(ideal, !veronese_off);
  ZigzagResult z = zigzag(b);
  Json o;
  Json wq = Json::array();
  for (size_t i = 0; i < z.wall_quotients.size(); ++i) {
    Json e;
    e["wall"] = z.wall_values[i].get_str();
    e["fan"] = to_json(z.wall_quotients[i]);
    wq.push_back(e);
  }
  o["wall_quotients"] = wq;
  Json cq = Json::array();
  for (size_t i = 0; i < z.chamber_quotients.size(); ++i) {
    Json e;
    e["chamber"] = static_cast<int>(i);
    e["fan"] = to_json(z.chamber_quotients[i]);
    cq.push_back(e);
  }
  o["chamber_quotients"] = cq;
  o["respects_u"] = zigzag_respects_u(b, z);
  if (chamber >= 0) {
    if (chamber >= static_cast<long>(z.chamber_quotients.size()))
      throw Error("chamber index out of range");
    Json e;
    e["chamber"] = static_cast<int>(chamber);
    e["fan"] = to_json(z.chamber_quotients[static_cast<size_t>(chamber)]);
    o = Json();
    o["chamber_quotient"] = e;
  }
  std::cout << print_document({"report", o});
  return 0;
}

int run_verify(const std::vector<std::string>& inputs, int jobs) {
  // parse first so malformed inputs surface as usage errors
  std::vector<FactorizationCertificate> certs;
  for (const auto& path : inputs) {
    Document d = load(path);
    if (d.kind != "certificate") throw Error("malformed document: expected a certificate");
    certs.push_back(factorization_from_json(d.payload));
  }
  std::vector<VerificationReport> reports(inputs.size());
  std::vector<std::string> errors(inputs.size());
  auto work = [&](size_t k) {
    try {
      reports[k] = check_weak_factorization(certs[k]);
    } catch (const Error& e) {
      errors[k] = e.what();
    }
  };
  if (jobs <= 1 || inputs.size() <= 1) {
    for (size_t k = 0; k < inputs.size(); ++k) work(k);
  } else {
    std::vector<std::future<void>> fs;
    size_t next = 0;
    while (next < inputs.size()) {
      fs.clear();
      for (int t = 0; t < jobs && next < inputs.size(); ++t, ++next)
        fs.push_back(std::async(std::launch::async, work, next));
      for (auto& f : fs) f.get();
    }
  }
  bool all_pass = true;
  for (size_t k = 0; k < inputs.size(); ++k) {
    if (!errors[k].empty()) {
      VerificationReport r;
      r.pass = false;
      r.conditions.push_back({"well-formed input", false, errors[k]});
      reports[k] = r;
    }
    if (!reports[k].pass) all_pass = false;
    std::cout << print_document(document_of_report(reports[k]));
  }
  return all_pass ? 0 : 2;
}

int run_pullback(const std::string& cert_path, const std::string& map_path,
                 const std::string& out_path) {
  Document cd = load(cert_path);
  if (cd.kind != "certificate") throw Error("pullback expects a certificate document");
  FactorizationCertificate cert = factorization_from_json(cd.payload);
  Json mj = Json::parse(slurp(map_path));
  MarkedComplex src = marked_from_json(mj.at("source"));
  ComplexMorphism phi = morphism_from_json(mj.at("morphism"));
  FactorizationCertificate pulled = pullback_factorization(src, cert.base.cx, phi, cert);
  std::string text = print_document(document_of_certificate(pulled));
  if (out_path.empty()) std::cout << text;
  else spit(out_path, text);
  return 0;
}

int run_final_object(const std::string& input) {
  PLInput in = load_pl_input(load(input));
  std::vector<int> labels(in.base.cx.cones().size(), 0);
  for (int b : in.base.boundary_rays) labels[static_cast<size_t>(b)] = 1;
  FinalObjectResult fo = final_object(in.base.cx, in.f, labels);
  MarkedComplex out;
  out.cx = fo.complex;
  std::cout << print_document(document_of_pl(out, fo.f));
  return 0;
}

int run_oracle(const std::string& kind, const std::string& input) {
  if (kind == "factor2d") {
    PLInput in = load_pl_input(load(input));
    if (in.base.cx.dim() != 2) throw Error("oracle factor2d expects a two-dimensional input");
    Subdivision s = subdivision_from_pl(in.base.cx, in.f);
    int top = -1;
    for (size_t i = 0; i < in.base.cx.cones().size(); ++i)
      if (in.base.cx.cones()[i].dim() == 2) top = static_cast<int>(i);
    auto seq = oracle_factor_2d(in.base.cx.cones()[static_cast<size_t>(top)],
                                s.state.chart(static_cast<size_t>(top)));
    Json o;
    if (seq) {
      Json a = Json::array();
      for (const auto& v : *seq) a.push_back(to_json(v));
      o["sequence"] = a;
    } else {
      o["sequence"] = nullptr;
      o["note"] = "search bound exceeded";
    }
    std::cout << print_document({"report", o});
    return 0;
  }
  if (kind == "weights") {
    Document d = load(input);
    if (d.kind != "ideal") throw Error("oracle weights expects an ideal document");
    MonomialIdeal ideal = ideal_from_json(d.payload);
    CobordismFan b = build_cobordism(ideal);
    WeightTable wt = weight_intervals(b);
    Json rows = Json::array();
    for (size_t c = 0; c < wt.cones.size(); ++c) {
      auto w = oracle_weights(b, wt.cones[c], 1, 16);
      Json row;
      row["cone"] = to_json(wt.cones[c]);
      row["interval"] = {wt.intervals[c].wmin.get_str(), wt.intervals[c].wmax.get_str()};
      Json ws = Json::array();
      if (w)
        for (const auto& x : *w) ws.push_back(x.get_str());
      row["oracle"] = ws;
      rows.push_back(row);
    }
    Json o;
    o["weights"] = rows;
    std::cout << print_document({"report", o});
    return 0;
  }
  throw Error("unknown oracle kind: " + kind + " (expected factor2d or weights)");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"toricfact: certified toric weak factorization"};
  app.require_subcommand(1);

  std::string input, output, map_path, plugin_path, oracle_kind;
  std::vector<std::string> inputs;
  bool non_functorial = false, veronese_off = false;
  int max_steps = 512, jobs = 1;
  long chamber = -1;

  auto* factorize = app.add_subcommand("factorize", "factor a blowup into star subdivisions");
  factorize->add_option("input", input)->required();
  factorize->add_option("-o,--output", output, "certificate output path");
  factorize->add_flag("--non-functorial", non_functorial, "skip the final-object construction");
  factorize->add_option("--max-steps", max_steps, "search bound");
  factorize->add_option("--plugin", plugin_path, "pi-desingularization plugin (shared object)");

  auto* cobordism = app.add_subcommand("cobordism", "emit the cobordism fan of an ideal");
  cobordism->add_option("input", input)->required();
  cobordism->add_flag("--veronese-off", veronese_off, "debug: skip the mandatory doubling");

  auto* wallscmd = app.add_subcommand("walls", "wall and chamber decomposition");
  wallscmd->add_option("input", input)->required();
  wallscmd->add_flag("--veronese-off", veronese_off);

  auto* quotients = app.add_subcommand("quotients", "zigzag quotient fans with certificates");
  quotients->add_option("input", input)->required();
  quotients->add_flag("--veronese-off", veronese_off);
  quotients->add_option("--chamber", chamber, "emit a single chamber quotient");

  auto* verify = app.add_subcommand("verify", "re-check certificates from scratch");
  verify->add_option("inputs", inputs)->required();
  verify->add_option("--jobs", jobs, "verify inputs in parallel");

  auto* pullback = app.add_subcommand("pullback", "pull a certificate back along a face map");
  pullback->add_option("certificate", input)->required();
  pullback->add_option("map", map_path)->required();
  pullback->add_option("-o,--output", output);

  auto* finalobj = app.add_subcommand("final-object", "final object of a complex with PL datum");
  finalobj->add_option("input", input)->required();

  auto* oracle = app.add_subcommand("oracle", "brute-force oracles (factor2d, weights)");
  oracle->add_option("kind", oracle_kind)->required();
  oracle->add_option("input", input)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (factorize->parsed())
      return run_factorize(input, output, non_functorial, max_steps, plugin_path);
    if (cobordism->parsed()) return run_cobordism(input, veronese_off);
    if (wallscmd->parsed()) return run_walls(input, veronese_off);
    if (quotients->parsed()) return run_quotients(input, veronese_off, chamber);
    if (verify->parsed()) return run_verify(inputs, jobs);
    if (pullback->parsed()) return run_pullback(input, map_path, output);
    if (finalobj->parsed()) return run_final_object(input);
    if (oracle->parsed()) return run_oracle(oracle_kind, input);
  } catch (const NotImplementedError& e) {
    Json o;
    o["error"] = "not_implemented";
    o["what"] = e.what();
    std::cout << o.dump(2) << "\n";
    std::cerr << "not implemented: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::string what = e.what();
    if (what.rfind("parse error", 0) == 0 || what.rfind("cannot open", 0) == 0 ||
        what.rfind("malformed document", 0) == 0 || what.rfind("unsupported format", 0) == 0 ||
        what.rfind("unknown document kind", 0) == 0 || what.rfind("cannot load plugin", 0) == 0 ||
        what.rfind("plugin does not export", 0) == 0) {
      std::cerr << "error: " << what << "\n";
      return 1;
    }
    Json o;
    o["error"] = "failed";
    o["what"] = what;
    std::cout << o.dump(2) << "\n";
    std::cerr << "error: " << what << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed document: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
