#pragma once

#include "ellfrob/rational.hpp"

#include <complex>
#include <string>
#include <vector>

namespace ellfrob {

// Element of Q(ζ_N) as a polynomial in ζ reduced modulo Φ_N.
// coefficients()[k] multiplies ζ^k, length is φ(N).
class Cyclotomic {
public:
    Cyclotomic() : Cyclotomic(1) {}
    explicit Cyclotomic(int order);
    Cyclotomic(int order, const Rational& value);
    // reduces an arbitrary polynomial in ζ
    Cyclotomic(int order, std::vector<Rational> poly);

    static Cyclotomic zeta_power(int order, long k);

    int order() const { return n_; }
    const std::vector<Rational>& coefficients() const { return c_; }

    bool is_zero() const;
    bool is_rational() const;
    Rational rational_part() const { return c_.empty() ? Rational(0) : c_[0]; }

    Cyclotomic inverse() const;
    // the automorphism ζ ↦ ζ^{-1}
    Cyclotomic conjugate() const;
    std::complex<double> to_complex() const;
    std::complex<long double> to_complex_ld() const;

    Cyclotomic& operator+=(const Cyclotomic& o);
    Cyclotomic& operator-=(const Cyclotomic& o);
    Cyclotomic& operator*=(const Cyclotomic& o);
    Cyclotomic& operator/=(const Cyclotomic& o) { return *this *= o.inverse(); }
    Cyclotomic operator-() const;

    friend Cyclotomic operator+(Cyclotomic a, const Cyclotomic& b) { return a += b; }
    friend Cyclotomic operator-(Cyclotomic a, const Cyclotomic& b) { return a -= b; }
    friend Cyclotomic operator*(Cyclotomic a, const Cyclotomic& b) { return a *= b; }
    friend Cyclotomic operator/(Cyclotomic a, const Cyclotomic& b) { return a /= b; }
    friend bool operator==(const Cyclotomic& a, const Cyclotomic& b);
    friend bool operator!=(const Cyclotomic& a, const Cyclotomic& b) { return !(a == b); }

    std::string str() const;

private:
    void align(const Cyclotomic& o);
    void reduce(std::vector<Rational> poly);

    int n_;
    std::vector<Rational> c_;
};

// integer coefficients of Φ_N, lowest degree first
const std::vector<long>& cyclotomic_polynomial(int order);
int euler_phi(int order);

inline Cyclotomic zero_like(const Cyclotomic& x) { return Cyclotomic(x.order()); }
inline Cyclotomic one_like(const Cyclotomic& x) { return Cyclotomic(x.order(), Rational(1)); }
inline bool is_zero(const Cyclotomic& x) { return x.is_zero(); }

Cyclotomic embed(const Rational& x, int order);

}  // namespace ellfrob
