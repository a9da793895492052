#include "ellfrob/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace ellfrob {

Real to_real(const Rational& q)
{
    if constexpr (sizeof(Real) == sizeof(double)) {
        return static_cast<Real>(q.get_d());
    } else {
        mpf_class x(q, 160);
        double hi = x.get_d();
        mpf_class rest = x - hi;
        return static_cast<Real>(hi) + static_cast<Real>(rest.get_d());
    }
}

Complex to_complex(const Cyclotomic& x)
{
    Complex r = 0;
    const auto& c = x.coefficients();
    for (size_t k = 0; k < c.size(); ++k) {
        if (sgn(c[k]) == 0) continue;
        Real ang = 2 * kPi * static_cast<Real>(k) / x.order();
        r += to_real(c[k]) * Complex(std::cos(ang), std::sin(ang));
    }
    return r;
}

CVec to_complex(const RVec& v)
{
    CVec r;
    r.reserve(v.size());
    for (const auto& x : v) r.emplace_back(to_real(x), 0);
    return r;
}

CVec to_complex(const std::vector<Cyclotomic>& v)
{
    CVec r;
    r.reserve(v.size());
    for (const auto& x : v) r.push_back(to_complex(x));
    return r;
}

Complex unit_phase(const Rational& x)
{
    // reduce mod 1 exactly before converting
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    Rational frac = x - Rational(fl);
    Real ang = 2 * kPi * to_real(frac);
    return {std::cos(ang), std::sin(ang)};
}

std::vector<CVec> cinverse(const std::vector<CVec>& m)
{
    size_t n = m.size();
    std::vector<CVec> a = m, inv(n, CVec(n, 0));
    for (size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t p = c;
        for (size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        if (std::abs(a[p][c]) == 0) throw std::runtime_error("singular complex matrix");
        std::swap(a[p], a[c]);
        std::swap(inv[p], inv[c]);
        Complex d = a[c][c];
        for (size_t j = 0; j < n; ++j) {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == Complex(0)) continue;
            Complex f = a[r][c];
            for (size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

CVec csolve(std::vector<CVec> m, CVec b)
{
    auto inv = cinverse(m);
    CVec x(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) x[i] += inv[i][j] * b[j];
    return x;
}

}  // namespace ellfrob
