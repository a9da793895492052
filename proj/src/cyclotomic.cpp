#include "ellfrob/cyclotomic.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ellfrob {

namespace {

using Poly = std::vector<Rational>;

void trim(Poly& p)
{
    while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

// quotient and remainder, divisor nonzero
std::pair<Poly, Poly> divmod(Poly a, const Poly& b)
{
    trim(a);
    Poly q;
    if (a.size() < b.size()) return {q, a};
    q.assign(a.size() - b.size() + 1, Rational(0));
    const Rational& lead = b.back();
    for (size_t k = q.size(); k-- > 0;) {
        Rational f = a[k + b.size() - 1] / lead;
        q[k] = f;
        if (sgn(f) == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) a[k + j] -= f * b[j];
    }
    trim(a);
    return {q, a};
}

Poly mul(const Poly& a, const Poly& b)
{
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, Rational(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (sgn(a[i]) == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

Poly sub(const Poly& a, const Poly& b)
{
    Poly r(std::max(a.size(), b.size()), Rational(0));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

Poly phi_poly(int n)
{
    const auto& c = cyclotomic_polynomial(n);
    Poly p;
    for (long x : c) p.emplace_back(x);
    return p;
}

std::vector<long> compute_phi(int order)
{
    // Φ_N = (x^N - 1) / Π_{d|N, d<N} Φ_d, exact integer division
    std::vector<long> num(order + 1, 0);
    num[0] = -1;
    num[order] = 1;
    for (int d = 1; d < order; ++d) {
        if (order % d) continue;
        std::vector<long> den = compute_phi(d);
        std::vector<long> q(num.size() - den.size() + 1, 0);
        for (size_t k = q.size(); k-- > 0;) {
            long f = num[k + den.size() - 1] / den.back();
            q[k] = f;
            for (size_t j = 0; j < den.size(); ++j) num[k + j] -= f * den[j];
        }
        num = q;
    }
    return num;
}

}  // namespace

const std::vector<long>& cyclotomic_polynomial(int order)
{
    if (order < 1) throw std::invalid_argument("cyclotomic order must be positive");
    static std::map<int, std::vector<long>> cache;
    static std::mutex mu;
    std::lock_guard lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_phi(order)).first;
    return it->second;
}

int euler_phi(int order) { return static_cast<int>(cyclotomic_polynomial(order).size()) - 1; }

Cyclotomic::Cyclotomic(int order) : n_(order), c_(euler_phi(order), Rational(0)) {}

Cyclotomic::Cyclotomic(int order, const Rational& value) : Cyclotomic(order) { c_[0] = value; }

Cyclotomic::Cyclotomic(int order, std::vector<Rational> poly) : n_(order)
{
    reduce(std::move(poly));
}

void Cyclotomic::reduce(std::vector<Rational> poly)
{
    auto [q, r] = divmod(std::move(poly), phi_poly(n_));
    r.resize(euler_phi(n_), Rational(0));
    c_ = std::move(r);
}

Cyclotomic Cyclotomic::zeta_power(int order, long k)
{
    long e = ((k % order) + order) % order;
    std::vector<Rational> p(e + 1, Rational(0));
    p[e] = 1;
    return Cyclotomic(order, std::move(p));
}

bool Cyclotomic::is_zero() const
{
    for (const auto& x : c_)
        if (sgn(x) != 0) return false;
    return true;
}

bool Cyclotomic::is_rational() const
{
    for (size_t i = 1; i < c_.size(); ++i)
        if (sgn(c_[i]) != 0) return false;
    return true;
}

void Cyclotomic::align(const Cyclotomic& o)
{
    if (o.n_ == n_) return;
    // rational constants embed into any field
    if (o.is_rational()) return;
    if (is_rational()) {
        Rational v = c_[0];
        *this = Cyclotomic(o.n_, v);
        return;
    }
    throw std::invalid_argument("cyclotomic fields of different order");
}

Cyclotomic& Cyclotomic::operator+=(const Cyclotomic& o)
{
    align(o);
    if (o.n_ != n_) {
        c_[0] += o.c_[0];
        return *this;
    }
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Cyclotomic& Cyclotomic::operator-=(const Cyclotomic& o)
{
    align(o);
    if (o.n_ != n_) {
        c_[0] -= o.c_[0];
        return *this;
    }
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Cyclotomic& Cyclotomic::operator*=(const Cyclotomic& o)
{
    align(o);
    if (o.n_ != n_) {
        for (auto& x : c_) x *= o.c_[0];
        return *this;
    }
    reduce(mul(c_, o.c_));
    return *this;
}

Cyclotomic Cyclotomic::operator-() const
{
    Cyclotomic r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

Cyclotomic Cyclotomic::inverse() const
{
    if (is_zero()) throw std::domain_error("inverse of zero cyclotomic number");
    // extended Euclid: s·a + t·Φ = g, g constant since Φ is irreducible
    Poly a = c_;
    trim(a);
    Poly r0 = phi_poly(n_), r1 = a;
    Poly s0 = {}, s1 = {Rational(1)};
    while (r1.size() > 1) {
        auto [q, r] = divmod(r0, r1);
        Poly s = sub(s0, mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    Rational g = r1.at(0);
    for (auto& x : s1) x /= g;
    return Cyclotomic(n_, s1);
}

Cyclotomic Cyclotomic::conjugate() const
{
    // ζ^k ↦ ζ^{N-k}
    std::vector<Rational> p(n_ + 1, Rational(0));
    for (size_t k = 0; k < c_.size(); ++k) p[(n_ - static_cast<int>(k)) % n_] += c_[k];
    return Cyclotomic(n_, std::move(p));
}

std::complex<double> Cyclotomic::to_complex() const
{
    std::complex<double> r = 0;
    for (size_t k = 0; k < c_.size(); ++k) {
        double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / n_;
        r += c_[k].get_d() * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return r;
}

std::complex<long double> Cyclotomic::to_complex_ld() const
{
    std::complex<long double> r = 0;
    for (size_t k = 0; k < c_.size(); ++k) {
        long double ang = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) / n_;
        long double v = static_cast<long double>(c_[k].get_num().get_d()) / c_[k].get_den().get_d();
        r += v * std::complex<long double>(std::cos(ang), std::sin(ang));
    }
    return r;
}

bool operator==(const Cyclotomic& a, const Cyclotomic& b)
{
    if (a.n_ != b.n_) {
        if (a.is_rational() && b.is_rational()) return a.c_[0] == b.c_[0];
        return false;
    }
    return a.c_ == b.c_;
}

std::string Cyclotomic::str() const
{
    std::string s;
    for (size_t k = 0; k < c_.size(); ++k) {
        if (sgn(c_[k]) == 0) continue;
        if (!s.empty()) s += " + ";
        s += "(" + to_string(c_[k]) + ")";
        if (k > 0) s += "*z" + std::to_string(n_) + "^" + std::to_string(k);
    }
    return s.empty() ? "0" : s;
}

Cyclotomic embed(const Rational& x, int order) { return Cyclotomic(order, x); }

}  // namespace ellfrob
