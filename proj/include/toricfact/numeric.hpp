#pragma once

// Exact scalar types and Eigen glue. All arithmetic in this project is
// arbitrary-precision (GMP); there is no floating point anywhere.

#include <Eigen/Core>
#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace Eigen {

template <> struct NumTraits<mpz_class> : GenericNumTraits<mpz_class> {
  typedef mpz_class Real;
  typedef mpq_class NonInteger;
  typedef mpz_class Nested;
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 1,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 100,
    MulCost = 100
  };
};

template <> struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  typedef mpq_class Real;
  typedef mpq_class NonInteger;
  typedef mpq_class Nested;
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 150
  };
};

} // namespace Eigen

namespace toricfact {

using Int = mpz_class;
using Rat = mpq_class;

using ZVec = Eigen::Matrix<Int, Eigen::Dynamic, 1>;
using ZMat = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;
using QVec = Eigen::Matrix<Rat, Eigen::Dynamic, 1>;
using QMat = Eigen::Matrix<Rat, Eigen::Dynamic, Eigen::Dynamic>;

// Thrown on violated preconditions and malformed inputs.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Extension-point surface: the default build has no answer here.
struct NotImplementedError : Error {
  explicit NotImplementedError(const std::string& what) : Error(what) {}
};

inline ZVec zvec(std::initializer_list<long> xs) {
  ZVec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (long x : xs) v(i++) = Int(x);
  return v;
}

inline ZMat zmat(Eigen::Index rows, Eigen::Index cols, std::initializer_list<long> xs) {
  if (static_cast<Eigen::Index>(xs.size()) != rows * cols) throw Error("zmat: size mismatch");
  ZMat m(rows, cols);
  Eigen::Index i = 0;
  for (long x : xs) {
    m(i / cols, i % cols) = Int(x);
    ++i;
  }
  return m;
}

inline ZMat zident(Eigen::Index n) {
  ZMat m = ZMat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Int gcd_all(const ZVec& v);

// Divide out the gcd of the coordinates; the zero vector stays zero.
ZVec primitive(const ZVec& v);

// Exact rational vector scaled to a primitive integer vector (positive multiple).
ZVec primitive(const QVec& v);

bool is_zero(const ZVec& v);

// Total lexicographic order on equal-length vectors.
int lex_compare(const ZVec& a, const ZVec& b);
bool lex_less(const ZVec& a, const ZVec& b);

int compare(const ZMat& a, const ZMat& b); // by shape, then entries row-major

std::string to_string(const ZVec& v);
std::string to_string(const ZMat& m);

QVec to_q(const ZVec& v);
QMat to_q(const ZMat& m);

// Clears denominators: smallest positive multiplier making all entries integral.
ZVec clear_denominators(const QVec& v);

void sort_rays(std::vector<ZVec>& rays);

bool ray_list_equal(const std::vector<ZVec>& a, const std::vector<ZVec>& b);

// Encoding used for canonical ordering and hashing of ray lists / matrices.
std::string encode(const std::vector<ZVec>& rays);
std::string encode(const ZMat& m);

} // namespace toricfact
