#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

#include "dcg/errors.hpp"

namespace dcg {

using Rational = mpq_class;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  Rational q(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
  q.canonicalize();
  return q;
}

/// Floor of a rational as a signed 64-bit integer.
inline std::int64_t floor_int(const Rational& q) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return static_cast<std::int64_t>(r.get_si());
}

inline std::int64_t ceil_int(const Rational& q) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return static_cast<std::int64_t>(r.get_si());
}

/// Exact conversion of a finite double. Used to turn a real-valued bound into
/// a rational so the comparison against an exact quantity is itself exact.
inline Rational from_double(double v) {
  Rational q(v);
  q.canonicalize();
  return q;
}

/// Parses "p/q" or an integer.
inline Rational parse_rational(const std::string& text) {
  Rational q;
  try {
    q = Rational(text, 10);
  } catch (const std::invalid_argument&) {
    throw ConfigError("not a rational number: '" + text + "'");
  }
  if (q.get_den() == 0) throw ConfigError("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace dcg
