#include "ellfrob/rational.hpp"

#include <stdexcept>

namespace ellfrob {

Rational make_rational(long num, long den)
{
    if (den == 0) throw std::domain_error("zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& x)
{
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

Rational parse_rational(const std::string& s)
{
    Rational r;
    if (s.empty() || r.set_str(s, 10) != 0) throw std::invalid_argument("not a rational: '" + s + "'");
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator: '" + s + "'");
    r.canonicalize();
    return r;
}

mpz_class common_denominator(const RVec& v)
{
    mpz_class d = 1;
    for (const auto& x : v) {
        mpz_class g;
        mpz_lcm(g.get_mpz_t(), d.get_mpz_t(), x.get_den_mpz_t());
        d = g;
    }
    return d;
}

RVec operator+(const RVec& a, const RVec& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("vector size mismatch");
    RVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

RVec operator-(const RVec& a, const RVec& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("vector size mismatch");
    RVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

RVec operator*(const Rational& s, const RVec& v)
{
    RVec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = s * v[i];
    return r;
}

bool is_zero(const RVec& v)
{
    for (const auto& x : v)
        if (sgn(x) != 0) return false;
    return true;
}

}  // namespace ellfrob
