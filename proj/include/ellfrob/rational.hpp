#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace ellfrob {

// Arbitrary-precision rational, always kept canonical.
using Rational = mpq_class;
using RVec = std::vector<Rational>;

Rational make_rational(long num, long den = 1);

// "p/q" or "p" when the denominator is 1.
std::string to_string(const Rational& x);
Rational parse_rational(const std::string& s);

inline Rational zero_like(const Rational&) { return Rational(0); }
inline Rational one_like(const Rational&) { return Rational(1); }
inline bool is_zero(const Rational& x) { return sgn(x) == 0; }

// lcm of the denominators of a vector
mpz_class common_denominator(const RVec& v);

RVec operator+(const RVec& a, const RVec& b);
RVec operator-(const RVec& a, const RVec& b);
RVec operator*(const Rational& s, const RVec& v);
bool is_zero(const RVec& v);

}  // namespace ellfrob
