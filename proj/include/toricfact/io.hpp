#pragma once

// Versioned structured-text documents. Canonical form: sorted keys, sorted
// ray lists where the underlying data is canonical, and integers as decimal
// strings so nothing is lost. parse(print(x)) == x on canonical values.

#include "toricfact/engine.hpp"
#include "toricfact/cobordism.hpp"
#include "toricfact/verify.hpp"

#include <json.hpp>

namespace toricfact {

using Json = nlohmann::json;

inline constexpr const char* kFormatTag = "toricfact/1";

Json to_json(const ZVec& v);
ZVec zvec_from_json(const Json& j);
Json to_json(const ZMat& m);
ZMat zmat_from_json(const Json& j);
Json to_json(const Cone& c);
Cone cone_from_json(const Json& j);
Json to_json(const Fan& f);
Fan fan_from_json(const Json& j);
Json to_json(const GenComplex& cx);
GenComplex complex_from_json(const Json& j);

Json to_json(const MarkedComplex& m);
MarkedComplex marked_from_json(const Json& j);
Json to_json(const PLDatum& f);
PLDatum pl_from_json(const Json& j);
Json to_json(const SubdivState& s);
SubdivState subdiv_from_json(const Json& j, const GenComplex& base);
Json to_json(const MonomialIdeal& i);
MonomialIdeal ideal_from_json(const Json& j);
Json to_json(const CoherenceCertificate& c);
CoherenceCertificate cert_from_json(const Json& j);
Json to_json(const CenterSet& c);
CenterSet centers_from_json(const Json& j, Eigen::Index ncharts);
Json to_json(const FactorizationCertificate& c);
FactorizationCertificate factorization_from_json(const Json& j);
Json to_json(const VerificationReport& r);
VerificationReport report_from_json(const Json& j);
Json to_json(const CobordismFan& b);
CobordismFan cobordism_from_json(const Json& j);
Json to_json(const ComplexMorphism& m);
ComplexMorphism morphism_from_json(const Json& j);

// Document envelope.
struct Document {
  std::string kind; // complex | ideal | pl | subdivision | cobordism |
                    // certificate | report
  Json payload;
};

std::string print_document(const Document& d);
Document parse_document(const std::string& text); // throws Error with position info

Document document_of_complex(const MarkedComplex& m);
Document document_of_ideal(const MonomialIdeal& i);
Document document_of_pl(const MarkedComplex& m, const PLDatum& f);
Document document_of_subdivision(const MarkedComplex& m, const SubdivState& s);
Document document_of_cobordism(const CobordismFan& b);
Document document_of_certificate(const FactorizationCertificate& c);
Document document_of_report(const VerificationReport& r);

struct PLInput {
  MarkedComplex base;
  PLDatum f;
};

// Accepts an ideal document (affine chart) or a pl document.
PLInput load_pl_input(const Document& d);

} // namespace toricfact
