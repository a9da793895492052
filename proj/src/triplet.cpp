#include "ellfrob/triplet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace ellfrob {

namespace {

Rational random_rational(std::mt19937_64& rng)
{
    // in (0, 1): ⟨e_j, z⟩ is only defined modulo the lattice, and small values keep sample points near L^⊥
    std::uniform_int_distribution<long> den(2, 13);
    long q = den(rng);
    std::uniform_int_distribution<long> num(1, q - 1);
    return make_rational(num(rng), q);
}

// basis [Fne1 | complement | a | δ] of F, restricted to the F coordinates
QMatrix f_basis_inverse(const MarkedEllipticRootSystem& sys, const CoxeterData& data,
                        const std::vector<RVec>& complement)
{
    std::vector<RVec> cols;
    size_t f = sys.dim() - 1;
    auto cut = [&](const RVec& v) { return RVec(v.begin(), v.begin() + static_cast<long>(f)); };
    for (const auto& v : data.Fne1) cols.push_back(cut(v));
    for (const auto& v : complement) cols.push_back(cut(v));
    cols.push_back(cut(sys.basis_vector(sys.ia())));
    cols.push_back(cut(sys.basis_vector(sys.idelta())));
    auto inv = inverse(QMatrix::from_columns(cols));
    if (!inv) throw std::logic_error("F^{≠1}, complement and rad I do not span F");
    return *inv;
}

Cyclotomic cform(const QMatrix& g, const std::vector<Cyclotomic>& x, const std::vector<Cyclotomic>& y)
{
    Cyclotomic s(x.empty() ? 1 : x[0].order());
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i].is_zero()) continue;
        for (size_t j = 0; j < y.size(); ++j)
            if (sgn(g(i, j)) != 0 && !y[j].is_zero()) s += x[i] * Cyclotomic(x[i].order(), g(i, j)) * y[j];
    }
    return s;
}

Complex cform(const QMatrix& g, const CVec& x, const CVec& y)
{
    Complex s = 0;
    for (size_t i = 0; i < x.size(); ++i)
        for (size_t j = 0; j < y.size(); ++j)
            if (sgn(g(i, j)) != 0) s += x[i] * to_real(g(i, j)) * y[j];
    return s;
}

void fill_coord_map(const MarkedEllipticRootSystem& sys, AdmissibleTriplet& t)
{
    size_t dim = sys.dim();
    std::vector<CVec> P(dim, CVec(dim, 0));  // columns z^1..z^n, a, δ
    for (size_t b = 0; b < t.z.size(); ++b)
        for (size_t i = 0; i < dim; ++i) P[i][b] = t.z[b][i];
    P[sys.ia()][t.z.size()] = 1;
    P[sys.idelta()][t.z.size() + 1] = 1;
    auto inv = cinverse(P);
    t.zCoordMap.assign(inv.begin(), inv.begin() + static_cast<long>(t.z.size()));
}

}  // namespace

std::pair<Rational, Rational> RegularPoint::pairing(const MarkedEllipticRootSystem& sys, const CoxeterData& data,
                                                    const RVec& x) const
{
    if (sgn(x[sys.iLambda()]) != 0) throw std::invalid_argument("regular point pairs only with F");
    QMatrix inv = f_basis_inverse(sys, data, complement);
    RVec xf(x.begin(), x.end() - 1);
    RVec c = inv * xf;
    size_t off = data.Fne1.size();
    Rational p = c[off + complement.size()], q = c[off + complement.size() + 1];
    for (size_t j = 0; j < complement.size(); ++j) {
        p += c[off + j] * u[j];
        q += c[off + j] * v[j];
    }
    return {p, q};
}

Complex RegularPoint::value(const MarkedEllipticRootSystem& sys, const CoxeterData& data, const RVec& x,
                            Complex tau) const
{
    auto [p, q] = pairing(sys, data, x);
    return -kTwoPiI * (to_real(p) + to_real(q) * tau);
}

bool is_regular(const MarkedEllipticRootSystem& sys, const CoxeterData& data, const RegularPoint& z)
{
    for (const auto& r : sys.finiteRoots) {
        auto [p, q] = z.pairing(sys, data, sys.embed(r));
        if (p.get_den() == 1 && q.get_den() == 1) return false;
    }
    return true;
}

RegularPoint regular_point(const MarkedEllipticRootSystem& sys, const CoxeterData& data, std::uint64_t seed,
                           int maxAttempts)
{
    RegularPoint z;
    z.seed = seed;
    std::vector<RVec> span{sys.basis_vector(sys.ia()), sys.basis_vector(sys.idelta())};
    for (const auto& v : data.Feq1) {
        span.push_back(v);
        if (span_rank(span) == span.size())
            z.complement.push_back(v);
        else
            span.pop_back();
    }
    std::mt19937_64 rng(seed);
    for (int attempt = 1; attempt <= maxAttempts; ++attempt) {
        z.u.clear();
        z.v.clear();
        for (size_t j = 0; j < z.complement.size(); ++j) {
            z.u.push_back(random_rational(rng));
            z.v.push_back(random_rational(rng));
        }
        z.attempts = attempt;
        if (is_regular(sys, data, z)) return z;
    }
    throw std::runtime_error("regular_point: no regular point found after " + std::to_string(maxAttempts) +
                             " attempts (seed " + std::to_string(seed) + ")");
}

std::string to_string(SignatureType t)
{
    switch (t) {
    case SignatureType::Positive: return "positive";
    case SignatureType::Zero: return "zero";
    case SignatureType::Negative: return "negative";
    default: return "other";
    }
}

std::string AdmissibilityReport::failures() const
{
    std::string s;
    auto add = [&](bool ok, const char* what) {
        if (!ok) s += (s.empty() ? "" : "; ") + std::string(what);
    };
    add(splitting, "(i) L does not split rad I");
    add(rootFree, "(i) L contains a root");
    add(zetaPrimitive, "(ii) ζ is not a primitive d_n-th root of unity");
    add(gStable, "(iii) g does not preserve L");
    add(eigenvalues, "(iii) eigenvalues of g on L differ from ζ^{d_α}");
    return s;
}

AdmissibilityReport check_admissible(const MarkedEllipticRootSystem& sys, const AdmissibleTriplet& t)
{
    AdmissibilityReport rep;
    Splitting sp;
    try {
        sp = make_splitting(sys, t.L);
        rep.splitting = true;
    } catch (const std::invalid_argument&) {
        return rep;
    }
    rep.rootFree = !root_in_subspace(sys, t.L);
    rep.zetaPrimitive = std::gcd(t.zetaExponent, t.dn) == 1;

    size_t n = t.L.size();
    std::vector<RVec> imgs;
    for (const auto& v : t.L) imgs.push_back(t.g(v));
    std::vector<RVec> both = t.L;
    both.insert(both.end(), imgs.begin(), imgs.end());
    rep.gStable = span_rank(both) == n;
    if (!rep.gStable) return rep;

    QMatrix gl(n, n);
    for (size_t j = 0; j < n; ++j) {
        RVec c = sp.lcoords(imgs[j]);
        for (size_t i = 0; i < n; ++i) gl(i, j) = c[i];
    }
    CMatrix cg = embed(gl, t.dn);
    rep.eigenvalues = true;
    size_t total = 0;
    for (int k = 0; k < t.dn; ++k) {
        size_t dimk = eigenspace(cg, Cyclotomic::zeta_power(t.dn, k)).size();
        long expect = std::count_if(t.degrees.begin(), t.degrees.end(),
                                    [&](int d) { return ((static_cast<long>(d) * t.zetaExponent) % t.dn) == k; });
        if (static_cast<long>(dimk) != expect) rep.eigenvalues = false;
        total += dimk;
    }
    if (total != n) rep.eigenvalues = false;
    return rep;
}

AdmissibleTriplet build_L(const MarkedEllipticRootSystem& sys, const CoxeterData& data, const RegularPoint& z,
                          const Rational& r)
{
    AdmissibleTriplet t;
    t.g = data.ss;
    t.dn = data.dn;
    t.zetaExponent = data.zetaExponent;
    t.degrees = data.degrees;
    t.r = r;

    std::vector<RVec> L0;
    for (size_t j = 0; j < z.complement.size(); ++j) {
        RVec w = z.complement[j];
        w[sys.ia()] -= z.u[j];
        w[sys.idelta()] -= z.v[j];
        L0.push_back(w);
    }
    std::vector<RVec> W = data.Fne1;
    W.insert(W.end(), L0.begin(), L0.end());

    // λ' ∈ W^⊥ with Λ0-coefficient 1 and a-coefficient 0
    QMatrix rows(W.size(), sys.dim(), Rational(0));
    for (size_t i = 0; i < W.size(); ++i)
        for (size_t j = 0; j < sys.dim(); ++j)
            for (size_t k = 0; k < sys.dim(); ++k) rows(i, j) += W[i][k] * sys.gram(k, j);
    auto perp = W.empty() ? std::vector<RVec>{} : kernel(rows);
    if (W.empty())
        for (size_t i = 0; i < sys.dim(); ++i) perp.push_back(sys.basis_vector(i));
    RVec lp;
    for (const auto& v : perp)
        if (sgn(v[sys.iLambda()]) != 0) {
            lp = (1 / v[sys.iLambda()]) * v;
            break;
        }
    if (lp.empty()) throw std::runtime_error("build_L: (F^{≠1} ⊕ L_0)^⊥ lies in F");
    lp[sys.ia()] = 0;
    Rational s = (r - sys.form(lp, lp)) / 2;
    lp[sys.idelta()] += s;
    t.lambdaR = lp;

    t.L = data.Fne1;
    t.nFne1 = data.Fne1.size();
    t.L.insert(t.L.end(), L0.begin(), L0.end());
    t.nL0 = L0.size();
    t.L.push_back(lp);
    if (static_cast<int>(t.L.size()) != sys.n) throw std::logic_error("build_L: dim L ≠ n");
    t.split = make_splitting(sys, t.L);

    // eigenvectors grouped by ascending degree
    CMatrix css = embed(t.g.matrix(), t.dn);
    std::map<int, int> mult;
    for (int d : t.degrees) ++mult[d];
    for (auto [d, m] : mult) {
        long k = (static_cast<long>(d) * t.zetaExponent) % t.dn;
        std::vector<std::vector<Cyclotomic>> vecs;
        if (k == 0) {
            for (size_t j = t.nFne1; j < t.L.size(); ++j) vecs.push_back(embed(t.L[j], t.dn));
        } else {
            vecs = eigenspace(css, Cyclotomic::zeta_power(t.dn, k));
        }
        if (static_cast<int>(vecs.size()) != m)
            throw std::runtime_error("build_L: eigenspace of g for degree " + std::to_string(d) + " has dimension " +
                                     std::to_string(vecs.size()) + ", expected " + std::to_string(m));
        for (auto& v : vecs) t.zExact.push_back(std::move(v));
    }
    for (const auto& v : t.zExact) t.z.push_back(to_complex(v));
    fill_coord_map(sys, t);

    t.signature = signature(gram_of(sys.gram, t.L));
    int n = sys.n;
    if (t.signature == Signature{n, 0, 0})
        t.sigType = SignatureType::Positive;
    else if (t.signature == Signature{n - 1, 1, 0})
        t.sigType = SignatureType::Zero;
    else if (t.signature == Signature{n - 1, 0, 1})
        t.sigType = SignatureType::Negative;
    t.admissibility = check_admissible(sys, t);
    return t;
}

AdmissibleTriplet dual_normalize(const MarkedEllipticRootSystem& sys, const CoxeterData& data, AdmissibleTriplet t)
{
    if (data.codim != 1) throw std::invalid_argument("dual_normalize: codimension is not 1");
    if (t.sigType != SignatureType::Zero) throw std::invalid_argument("dual_normalize: triplet is not of zero type");
    int n = t.n();
    int dn = t.dn;
    for (int a = 1; a < n; ++a)
        if (t.degrees[a - 1] + t.degrees[n - a - 1] != dn)
            throw std::logic_error("dual_normalize: degrees are not dual (d_α + d_{n−α} ≠ d_n)");

    std::vector<CVec> z(n);
    // index groups of equal degree among 0..n-2
    std::map<int, std::vector<int>> groups;
    for (int a = 0; a < n - 1; ++a) groups[t.degrees[a]].push_back(a);
    for (auto& [d, idx] : groups) {
        if (2 * d < dn) {
            const auto& partner = groups.at(dn - d);
            size_t k = idx.size();
            std::vector<std::vector<Cyclotomic>> u, w;
            for (int a : idx) u.push_back(t.zExact[a]);
            // partner of idx[i] is n-2-idx[i]
            for (size_t i = 0; i < k; ++i) w.push_back(t.zExact[n - 2 - idx[i]]);
            (void)partner;
            CMatrix G(k, k, Cyclotomic(dn));
            for (size_t i = 0; i < k; ++i)
                for (size_t j = 0; j < k; ++j) G(i, j) = cform(sys.gram, u[i], w[j]);
            auto X = inverse(G);
            if (!X) throw std::runtime_error("dual_normalize: degenerate pairing between dual eigenspaces");
            for (size_t i = 0; i < k; ++i) {
                std::vector<Cyclotomic> wi(sys.dim(), Cyclotomic(dn));
                for (size_t m = 0; m < k; ++m)
                    for (size_t c = 0; c < sys.dim(); ++c) wi[c] += w[m][c] * (*X)(m, i);
                t.zExact[n - 2 - idx[i]] = wi;
                z[idx[i]] = to_complex(u[i]);
                z[n - 2 - idx[i]] = to_complex(wi);
            }
        } else if (2 * d == dn) {
            // self-dual block: orthonormalize numerically, then pair (e ± i e')/√2
            size_t k = idx.size();
            std::vector<CVec> e;
            for (int a : idx) {
                CVec v = to_complex(t.zExact[a]);
                for (const auto& b : e) {
                    Complex p = cform(sys.gram, v, b);
                    for (size_t c = 0; c < v.size(); ++c) v[c] -= p * b[c];
                }
                Complex nn = std::sqrt(cform(sys.gram, v, v));
                for (auto& x : v) x /= nn;
                e.push_back(v);
            }
            Real h = 1 / std::sqrt(Real(2));
            for (size_t i = 0; i < k / 2; ++i) {
                CVec p(sys.dim()), m(sys.dim());
                for (size_t c = 0; c < sys.dim(); ++c) {
                    p[c] = h * (e[2 * i][c] + Complex(0, 1) * e[2 * i + 1][c]);
                    m[c] = h * (e[2 * i][c] - Complex(0, 1) * e[2 * i + 1][c]);
                }
                z[idx[i]] = p;
                z[idx[k - 1 - i]] = m;
            }
            if (k % 2) z[idx[k / 2]] = e[k - 1];
        }
    }
    // z^n = −2π√−1·λ_0, normalized by Ĩ(λ_0, δ) = 1
    CVec lam = to_complex(t.lambdaR);
    for (auto& x : lam) x *= -kTwoPiI;
    z[n - 1] = lam;
    t.z = z;
    t.dualNormalized = true;
    fill_coord_map(sys, t);

    auto G = z_gram(sys, t);
    Real worst = 0;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b) worst = std::max(worst, std::abs(G[a][b] - Complex(a + b == n ? 1 : 0)));
    if (worst > 1e-10) throw std::runtime_error("dual_normalize: Gram matrix is not anti-diagonal");
    return t;
}

std::vector<CVec> z_gram(const MarkedEllipticRootSystem& sys, const AdmissibleTriplet& t)
{
    int n = t.n();
    std::vector<CVec> basis;
    CVec z0(sys.dim(), 0);
    z0[sys.idelta()] = Complex(1) / (-kTwoPiI);
    basis.push_back(z0);
    for (const auto& v : t.z) basis.push_back(v);
    std::vector<CVec> G(n + 1, CVec(n + 1));
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b) G[a][b] = cform(sys.gram, basis[a], basis[b]);
    return G;
}

CVec AdmissibleTriplet::zcoords(const RVec& nu) const
{
    CVec c(zCoordMap.size(), 0);
    for (size_t i = 0; i < nu.size(); ++i) {
        if (sgn(nu[i]) == 0) continue;
        Real x = to_real(nu[i]);
        for (size_t b = 0; b < c.size(); ++b) c[b] += zCoordMap[b][i] * x;
    }
    return c;
}

Complex YPoint::pair(const RVec& mu) const
{
    Complex s = 0;
    for (size_t i = 0; i < mu.size(); ++i)
        if (sgn(mu[i]) != 0) s += to_real(mu[i]) * values[i];
    return s;
}

Complex YPoint::pair(const CVec& mu) const
{
    Complex s = 0;
    for (size_t i = 0; i < mu.size(); ++i) s += mu[i] * values[i];
    return s;
}

YPoint point_from_coords(const MarkedEllipticRootSystem& sys, const AdmissibleTriplet& t, Complex tau, const CVec& w)
{
    YPoint x;
    x.values.assign(sys.dim(), 0);
    for (size_t i = 0; i < sys.dim(); ++i) {
        RVec e = sys.basis_vector(i);
        auto [ca, cd] = t.rad(e);
        Complex v = -kTwoPiI * (to_real(ca) + to_real(cd) * tau);
        for (size_t b = 0; b < w.size(); ++b) v += t.zCoordMap[b][i] * w[b];
        x.values[i] = v;
    }
    return x;
}

YPoint act(const QMatrix& g, const YPoint& x)
{
    auto inv = inverse(g);
    if (!inv) throw std::invalid_argument("act: singular automorphism");
    YPoint y;
    y.values.assign(x.values.size(), 0);
    for (size_t i = 0; i < x.values.size(); ++i)
        for (size_t j = 0; j < x.values.size(); ++j)
            if (sgn((*inv)(j, i)) != 0) y.values[i] += to_real((*inv)(j, i)) * x.values[j];
    return y;
}

YPoint LperpChart::point(Complex tau) const { return point_from_coords(*sys, *triplet, tau, CVec(triplet->z.size(), 0)); }

bool LperpChart::g_fixes_exactly() const
{
    auto inv = inverse(triplet->g.matrix());
    if (!inv) return false;
    for (size_t i = 0; i < sys->dim(); ++i) {
        RVec e = sys->basis_vector(i);
        if (triplet->rad(*inv * e) != triplet->rad(e)) return false;
    }
    return true;
}

bool LperpChart::regular_at(Complex tau, Real tol) const
{
    YPoint x = point(tau);
    for (const auto& r : sys->finiteRoots) {
        auto [u, v] = triplet->rad(sys->embed(r));
        if (u.get_den() == 1 && v.get_den() == 1) return false;
        for (long m = -10; m <= 10; ++m)
            for (long k = -10; k <= 10; ++k)
                if (std::abs(x.pair(sys->embed(r, m, k))) < tol) return false;
    }
    return true;
}

LperpChart lperp_chart(const MarkedEllipticRootSystem& sys, const AdmissibleTriplet& t) { return {&t, &sys}; }

}  // namespace ellfrob
