#include "toricfact/numeric.hpp"

#include <sstream>

namespace toricfact {

Int gcd_all(const ZVec& v) {
  Int g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Int a = abs(v(i));
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
  }
  return g;
}

ZVec primitive(const ZVec& v) {
  Int g = gcd_all(v);
  if (g == 0 || g == 1) return v;
  ZVec w(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) w(i) = v(i) / g;
  return w;
}

ZVec primitive(const QVec& v) {
  Int l = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Int d = v(i).get_den();
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
  }
  ZVec w(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Rat r = v(i) * Rat(l);
    r.canonicalize();
    w(i) = r.get_num();
  }
  return primitive(w);
}

bool is_zero(const ZVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != 0) return false;
  return true;
}

int lex_compare(const ZVec& a, const ZVec& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    int c = cmp(a(i), b(i));
    if (c != 0) return c < 0 ? -1 : 1;
  }
  return 0;
}

bool lex_less(const ZVec& a, const ZVec& b) { return lex_compare(a, b) < 0; }

int compare(const ZMat& a, const ZMat& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows() ? -1 : 1;
  if (a.cols() != b.cols()) return a.cols() < b.cols() ? -1 : 1;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      int c = cmp(a(i, j), b(i, j));
      if (c != 0) return c < 0 ? -1 : 1;
    }
  return 0;
}

std::string to_string(const ZVec& v) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v(i).get_str();
  }
  os << ")";
  return os.str();
}

std::string to_string(const ZMat& m) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) os << ";";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ",";
      os << m(i, j).get_str();
    }
  }
  os << "]";
  return os.str();
}

QVec to_q(const ZVec& v) {
  QVec q(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) q(i) = Rat(v(i));
  return q;
}

QMat to_q(const ZMat& m) {
  QMat q(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) q(i, j) = Rat(m(i, j));
  return q;
}

ZVec clear_denominators(const QVec& v) {
  Int l = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Int d = v(i).get_den();
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
  }
  ZVec w(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Rat r = v(i) * Rat(l);
    r.canonicalize();
    w(i) = r.get_num();
  }
  return w;
}

void sort_rays(std::vector<ZVec>& rays) {
  std::sort(rays.begin(), rays.end(), lex_less);
}

bool ray_list_equal(const std::vector<ZVec>& a, const std::vector<ZVec>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (lex_compare(a[i], b[i]) != 0) return false;
  return true;
}

std::string encode(const std::vector<ZVec>& rays) {
  std::ostringstream os;
  os << rays.size() << "|";
  for (const auto& r : rays) os << to_string(r);
  return os.str();
}

std::string encode(const ZMat& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols() << to_string(m);
  return os.str();
}

} // namespace toricfact
