#include "ellfrob/frobenius.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace ellfrob {

int degree_of(const Setting& s, int alpha) { return alpha == 0 ? 0 : s.degrees()[static_cast<size_t>(alpha - 1)]; }

QJet dx_jet(const Setting& s, const BasicInvariantSet& xs, int alpha, int gamma)
{
    const auto& d = s.degrees();
    if (alpha == 0) {
        if (gamma == 0) return QJet::one(d, s.jetWeight);
        return QJet(d, s.jetWeight);
    }
    return jet_derivative(s, xs.jets[static_cast<size_t>(alpha - 1)], gamma);
}

namespace {

std::vector<CVec> gram_cache(const Setting& s) { return z_gram(s.sys, s.triplet); }

Real gram_threshold(const std::vector<CVec>& G)
{
    Real m = 0;
    for (const auto& row : G)
        for (auto v : row) m = std::max(m, std::abs(v));
    return 1e-12 * m;
}

QJet intersection_jet_with(const Setting& s, const BasicInvariantSet& xs, const std::vector<CVec>& G, int alpha,
                           int beta)
{
    int n = s.n();
    int top = s.jetWeight - s.dn();
    Real thr = gram_threshold(G);
    std::vector<QJet> da, db;
    for (int g = 0; g <= n; ++g) {
        da.push_back(dx_jet(s, xs, alpha, g).truncated(top));
        db.push_back(dx_jet(s, xs, beta, g).truncated(top));
    }
    QJet r(s.degrees(), top);
    for (int g1 = 0; g1 <= n; ++g1) {
        if (da[g1].terms().empty()) continue;
        for (int g2 = 0; g2 <= n; ++g2) {
            auto G12 = G[g1][g2];
            if (std::abs(G12) <= thr || db[g2].terms().empty()) continue;
            r += jet_product(da[g1], db[g2]) * G12;
        }
    }
    return r;
}

Complex monomial_value(const MultiIndex& a, const CVec& x)
{
    Complex v = 1;
    for (size_t i = 0; i < a.size(); ++i)
        for (int k = 0; k < a[i]; ++k) v *= x[i];
    return v;
}

// Solves the square block-triangular jet system once per degree; monomial jets are cached.
class Expander {
public:
    Expander(const Setting& s, const BasicInvariantSet& xs) : s_(s), xs_(xs) {}

    InvariantExpansion run(const QJet& f, int m)
    {
        const auto& d = s_.degrees();
        int n = s_.n();
        int W = f.max_weight();
        if (m > W) throw std::invalid_argument("expand: jet too short for degree " + std::to_string(m));
        auto cols = multi_indices(d, m, true);
        std::vector<MultiIndex> square;
        for (int k = 0; m - k * s_.dn() >= 0; ++k)
            for (auto& b : multi_indices(d, m - k * s_.dn(), true))
                if (b[static_cast<size_t>(n - 1)] == 0) square.push_back(b);
        if (square.size() != cols.size())
            throw std::logic_error("expand: square system has " + std::to_string(square.size()) + " rows for " +
                                   std::to_string(cols.size()) + " monomials");
        InvariantExpansion out;
        out.degree = m;
        if (cols.empty()) return out;

        std::vector<const QJet*> cj;
        for (auto& a : cols) cj.push_back(&jet(a, W));
        QMatrixS M(square.size(), std::vector<QSeries>(cols.size()));
        std::vector<QSeries> rhs;
        for (size_t i = 0; i < square.size(); ++i) {
            for (size_t j = 0; j < cols.size(); ++j) M[i][j] = cj[j]->coeff(square[i]);
            rhs.push_back(f.coeff(square[i]));
        }
        auto c = qsolve(M, rhs);
        for (size_t j = 0; j < cols.size(); ++j) out.coeffs[cols[j]] = c[j];

        // every row within the truncation
        Real scale = weighted_norm(f);
        if (scale <= 0) scale = 1;
        Real res = 0;
        for (auto& b : multi_indices(d, W)) {
            QSeries lhs = QSeries::zero();
            bool any = false;
            for (size_t j = 0; j < cols.size(); ++j) {
                auto it = cj[j]->terms().find(b);
                if (it == cj[j]->terms().end()) continue;
                lhs += it->second * c[j];
                any = true;
            }
            QSeries want = f.coeff(b);
            if (!any && want.coeffs().empty()) continue;
            res = std::max(res, weighted_distance(lhs, want));
        }
        out.residual = res / scale;
        return out;
    }

private:
    const QJet& jet(const MultiIndex& a, int W)
    {
        auto key = std::make_pair(a, W);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, monomial_jet(xs_, a, W)).first;
        return it->second;
    }

    const Setting& s_;
    const BasicInvariantSet& xs_;
    std::map<std::pair<MultiIndex, int>, QJet> cache_;
};

}  // namespace

QJet intersection_jet(const Setting& s, const BasicInvariantSet& xs, int alpha, int beta)
{
    return intersection_jet_with(s, xs, gram_cache(s), alpha, beta);
}

Complex intersection_at(const Setting& s, const BasicInvariantSet& xs, const PointEval& pe, int alpha, int beta)
{
    auto grad = [&](int a) {
        CVec g(s.sys.dim(), 0);
        if (a == 0)
            g[s.sys.idelta()] = Complex(1) / (-kTwoPiI);
        else
            g = eval_poly(s, pe, xs.x[static_cast<size_t>(a - 1)]).second;
        return g;
    };
    CVec ga = grad(alpha), gb = grad(beta);
    Complex v = 0;
    for (size_t i = 0; i < ga.size(); ++i)
        for (size_t j = 0; j < gb.size(); ++j) {
            if (sgn(s.sys.gram(i, j)) == 0) continue;
            v += ga[i] * to_real(s.sys.gram(i, j)) * gb[j];
        }
    return v;
}

InvariantExpansion expand(const Setting& s, const BasicInvariantSet& xs, const QJet& f, int m)
{
    return Expander(s, xs).run(f, m);
}

InvariantExpansion intersection_taylor_formula(const Setting& s, const BasicInvariantSet& xs, int alpha, int beta)
{
    int n = s.n();
    int m = degree_of(s, alpha) + degree_of(s, beta);
    QJet J = dx_jet(s, xs, alpha, n - beta) + dx_jet(s, xs, beta, n - alpha);
    InvariantExpansion out;
    out.degree = m;
    for (auto& b : multi_indices(s.degrees(), m, true)) {
        if (b[static_cast<size_t>(n - 1)] != 0) continue;
        out.coeffs[b] = J.coeff(b);
    }
    if (alpha + beta == n) {
        MultiIndex en(static_cast<size_t>(n), 0);
        en[static_cast<size_t>(n - 1)] = 1;
        out.coeffs[en] = QSeries::constant(Complex(Real(s.dn())) / (-kTwoPiI));
    }
    return out;
}

Real xpoly_norm(const XPoly& p)
{
    Real m = 0;
    for (const auto& [a, c] : p) m = std::max(m, weighted_norm(c));
    return m;
}

Real expansion_distance(const XPoly& a, const XPoly& b)
{
    Real scale = std::max(xpoly_norm(a), xpoly_norm(b));
    if (scale <= 0) return 0;
    return expansion_difference(a, b) / scale;
}

Real expansion_difference(const XPoly& a, const XPoly& b)
{
    Real m = 0;
    for (const auto& [k, f] : a) {
        auto it = b.find(k);
        m = std::max(m, it == b.end() ? weighted_norm(f) : weighted_distance(f, it->second));
    }
    for (const auto& [k, f] : b)
        if (!a.count(k)) m = std::max(m, weighted_norm(f));
    return m;
}

XPoly xpoly_scale(XPoly p, Complex c)
{
    for (auto& [a, f] : p) f *= c;
    return p;
}

XPoly xpoly_add(XPoly a, const XPoly& b)
{
    for (const auto& [k, f] : b) {
        auto it = a.find(k);
        if (it == a.end())
            a.emplace(k, f);
        else
            it->second += f;
    }
    return a;
}

XPoly xpoly_mul(const XPoly& a, const XPoly& b) { return poly_mul(a, b); }

XPoly xpoly_derivative(const XPoly& p, int rho)
{
    XPoly r;
    for (const auto& [a, f] : p) {
        if (rho == 0) {
            r[a] = f.q_derivative() * kTwoPiI;
            continue;
        }
        size_t k = static_cast<size_t>(rho - 1);
        if (a[k] == 0) continue;
        MultiIndex b = a;
        --b[k];
        auto it = r.find(b);
        QSeries t = f * Complex(a[k]);
        if (it == r.end())
            r.emplace(b, t);
        else
            it->second += t;
    }
    return r;
}

Complex xpoly_eval(const XPoly& p, Complex tau, const CVec& x)
{
    Complex v = 0;
    for (const auto& [a, f] : p) v += f.eval(tau) * monomial_value(a, x);
    return v;
}

Complex xpoly_eval_at(const Setting& s, const BasicInvariantSet& xs, const XPoly& p, const PointEval& pe)
{
    CVec x;
    for (const auto& xa : xs.x) x.push_back(eval_poly(s, pe, xa).first);
    return xpoly_eval(p, pe.tau, x);
}

FrobeniusTable metric_and_constants(const Setting& s, const BasicInvariantSet& xs, Complex c)
{
    int n = s.n();
    size_t N = static_cast<size_t>(n) + 1;
    FrobeniusTable t;
    t.n = n;
    t.dn = s.dn();
    t.c = c;
    t.degrees.push_back(0);
    for (int d : s.degrees()) t.degrees.push_back(d);
    for (int a = 1; a < n; ++a)
        if (t.degrees[a] + t.degrees[n - a] != t.dn)
            throw std::logic_error("metric_and_constants: degrees are not dual (d_a + d_{n-a} != d_n)");
    t.unitIndex = n;

    auto G = gram_cache(s);
    Expander ex(s, xs);
    t.cI.assign(N, std::vector<XPoly>(N));
    t.expandResidual.assign(N, std::vector<Real>(N, 0));
    for (int a = 0; a <= n; ++a)
        for (int b = a; b <= n; ++b) {
            auto e = ex.run(intersection_jet_with(s, xs, G, a, b), t.degrees[a] + t.degrees[b]);
            t.cI[a][b] = xpoly_scale(e.coeffs, c);
            t.cI[b][a] = t.cI[a][b];
            t.expandResidual[a][b] = t.expandResidual[b][a] = e.residual;
        }

    // g^{αβ} = ∂_n cĨ(dx^α, dx^β), a constant
    t.gUpper.assign(N, CVec(N, 0));
    MultiIndex zero(static_cast<size_t>(n), 0);
    for (size_t a = 0; a < N; ++a)
        for (size_t b = 0; b < N; ++b) {
            auto dp = xpoly_derivative(t.cI[a][b], n);
            Complex g0 = 0;
            if (auto it = dp.find(zero); it != dp.end()) g0 = it->second.coeff(Rational(0));
            t.gUpper[a][b] = g0;
            for (const auto& [k, f] : dp)
                t.metricNonConstancy = std::max(
                    t.metricNonConstancy, k == zero ? weighted_distance(f, QSeries::constant(g0)) : weighted_norm(f));
        }
    t.gLower = cinverse(t.gUpper);

    // T^{α'β'}_{γ'} = ∂_{γ'}((d_n/(d_α' + d_β'))·cĨ(dx^α', dx^β'))
    std::vector<std::vector<std::vector<XPoly>>> T(N, std::vector<std::vector<XPoly>>(N, std::vector<XPoly>(N)));
    for (size_t a = 0; a < N; ++a)
        for (size_t b = 0; b < N; ++b) {
            int den = t.degrees[a] + t.degrees[b];
            if (den == 0) continue;
            auto p = xpoly_scale(t.cI[a][b], Complex(Real(t.dn) / den));
            for (size_t g = 0; g < N; ++g) T[a][b][g] = xpoly_derivative(p, static_cast<int>(g));
        }

    Real thr = 1e-12;
    t.C.assign(N, std::vector<std::vector<XPoly>>(N, std::vector<XPoly>(N)));
    for (size_t a = 0; a < N; ++a)
        for (size_t b = 0; b < N; ++b) {
            if (static_cast<int>(a) == n) {
                t.C[a][b][b][zero] = QSeries::constant(1);
                continue;
            }
            for (size_t g = 0; g < N; ++g) {
                XPoly acc;
                for (size_t a1 = 0; a1 < N; ++a1) {
                    if (std::abs(t.gLower[a][a1]) <= thr) continue;
                    for (size_t b1 = 0; b1 < N; ++b1) {
                        if (std::abs(t.gLower[b][b1]) <= thr) continue;
                        for (size_t g1 = 0; g1 < N; ++g1) {
                            Complex w = t.gLower[a][a1] * t.gLower[b][b1] * t.gUpper[g][g1];
                            if (std::abs(w) <= thr || T[a1][b1][g1].empty()) continue;
                            acc = xpoly_add(std::move(acc), xpoly_scale(T[a1][b1][g1], w));
                        }
                    }
                }
                t.C[a][b][g] = std::move(acc);
            }
        }
    return t;
}

FrobeniusTable rescaled(const FrobeniusTable& t, Complex factor)
{
    FrobeniusTable r = t;
    for (auto& row : r.C)
        for (auto& col : row)
            for (auto& p : col) p = xpoly_scale(std::move(p), Complex(1) / factor);
    r.unitScale *= factor;
    for (auto& row : r.gLower)
        for (auto& v : row) v /= factor;
    for (auto& row : r.gUpper)
        for (auto& v : row) v *= factor;
    return r;
}

std::vector<XPoint> chart_samples(const Setting& s, int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<XPoint> pts;
    for (int i = 0; i < count; ++i) {
        XPoint p;
        p.tau = Complex(u(rng) - 0.5, 0.48 + 0.32 * u(rng));
        for (int b = 0; b < s.n(); ++b) p.x.push_back(std::polar<Real>(0.2 * u(rng), 2 * kPi * u(rng)));
        pts.push_back(std::move(p));
    }
    return pts;
}

Real FrobeniusReport::worst() const
{
    Real m = 0;
    for (auto& [k, v] : items()) m = std::max(m, v);
    return m;
}

std::vector<std::pair<std::string, Real>> FrobeniusReport::items() const
{
    return {{"metric_antidiagonal", metricAntiDiagonal},
            {"metric_constant", metricConstant},
            {"unit_row", unitRow},
            {"unit_column", unitColumn},
            {"commutativity", commutativity},
            {"associativity", associativity},
            {"invariance", invariance},
            {"potentiality", potentiality},
            {"euler_degree", eulerDegree},
            {"intersection", intersection},
            {"metric_from_lie", metricFromLie},
            {"unit_characterization", unitCharacterization}};
}

FrobeniusReport verify_frobenius(const Setting& s, const FrobeniusTable& t, const std::vector<XPoint>& pts)
{
    (void)s;
    FrobeniusReport rep;
    int n = t.n;
    size_t N = static_cast<size_t>(n) + 1;
    rep.metricConstant = t.metricNonConstancy;

    // expected g_{αβ} = δ_{α+β,n}/unitScale for the rescaled family
    for (size_t a = 0; a < N; ++a)
        for (size_t b = 0; b < N; ++b) {
            Complex want = (static_cast<int>(a + b) == n) ? Complex(1) / t.unitScale : Complex(0);
            rep.metricAntiDiagonal = std::max(rep.metricAntiDiagonal, std::abs(t.gLower[a][b] - want));
        }

    // degree check on the polynomial tables
    Real cscale = 0;
    for (size_t a = 0; a < N; ++a)
        for (size_t b = 0; b < N; ++b)
            for (size_t g = 0; g < N; ++g) cscale = std::max(cscale, xpoly_norm(t.C[a][b][g]));
    for (size_t a = 0; a < N; ++a)
        for (size_t b = 0; b < N; ++b)
            for (size_t g = 0; g < N; ++g) {
                int want = t.dn + t.degrees[g] - t.degrees[a] - t.degrees[b];
                for (const auto& [k, f] : t.C[a][b][g]) {
                    int w = 0;
                    for (size_t i = 0; i < k.size(); ++i) w += k[i] * t.degrees[i + 1];
                    if (w != want) rep.eulerDegree = std::max(rep.eulerDegree, weighted_norm(f) / std::max<Real>(cscale, 1));
                }
            }

    // lowered constants c_{αβγ} and their derivatives
    std::vector<std::vector<std::vector<XPoly>>> low(N, std::vector<std::vector<XPoly>>(N, std::vector<XPoly>(N)));
    for (size_t a = 0; a < N; ++a)
        for (size_t b = 0; b < N; ++b)
            for (size_t g = 0; g < N; ++g) {
                XPoly acc;
                for (size_t sg = 0; sg < N; ++sg)
                    if (std::abs(t.gLower[g][sg]) > 1e-12)
                        acc = xpoly_add(std::move(acc), xpoly_scale(t.C[a][b][sg], t.gLower[g][sg]));
                low[a][b][g] = std::move(acc);
            }

    MultiIndex zero(static_cast<size_t>(n), 0);
    // (∂/∂x^n)² Ĩ(dx^n, dx^n): table-independent of points
    {
        auto d2 = xpoly_derivative(xpoly_derivative(t.cI[n][n], n), n);
        Real sc = std::max<Real>(xpoly_norm(t.cI[n][n]), 1e-300);
        rep.unitCharacterization = xpoly_norm(d2) / sc;
    }

    for (const auto& p : pts) {
        using V3 = std::vector<std::vector<CVec>>;
        V3 Cv(N, std::vector<CVec>(N, CVec(N))), cv(N, std::vector<CVec>(N, CVec(N)));
        Real scale = 1;
        for (size_t a = 0; a < N; ++a)
            for (size_t b = 0; b < N; ++b)
                for (size_t g = 0; g < N; ++g) {
                    Cv[a][b][g] = xpoly_eval(t.C[a][b][g], p.tau, p.x);
                    cv[a][b][g] = xpoly_eval(low[a][b][g], p.tau, p.x);
                    scale = std::max(scale, std::abs(Cv[a][b][g]));
                }
        for (size_t b = 0; b < N; ++b)
            for (size_t g = 0; g < N; ++g) {
                Complex d = (b == g) ? Complex(1) : Complex(0);
                rep.unitRow = std::max(rep.unitRow, std::abs(t.unitScale * Cv[n][b][g] - d));
                rep.unitColumn = std::max(rep.unitColumn, std::abs(t.unitScale * Cv[b][n][g] - d));
            }
        for (size_t a = 0; a < N; ++a)
            for (size_t b = 0; b < N; ++b)
                for (size_t g = 0; g < N; ++g) {
                    rep.commutativity = std::max(rep.commutativity, std::abs(Cv[a][b][g] - Cv[b][a][g]) / scale);
                    Real sym = std::max({std::abs(cv[a][b][g] - cv[b][a][g]), std::abs(cv[a][b][g] - cv[a][g][b]),
                                         std::abs(cv[a][b][g] - cv[g][b][a])});
                    rep.invariance = std::max(rep.invariance, sym / scale);
                    for (size_t r = 0; r < N; ++r) {
                        Complex lhs = 0, rhs = 0;
                        for (size_t sg = 0; sg < N; ++sg) {
                            lhs += Cv[a][b][sg] * Cv[sg][g][r];
                            rhs += Cv[b][g][sg] * Cv[a][sg][r];
                        }
                        rep.associativity = std::max(rep.associativity, std::abs(lhs - rhs) / (scale * scale));
                    }
                }
        // potentiality: ∂_ρ c_{αβγ} symmetric in (ρ, α)
        for (size_t r = 0; r < N; ++r)
            for (size_t a = 0; a < r; ++a)
                for (size_t b = 0; b < N; ++b)
                    for (size_t g = b; g < N; ++g) {
                        Complex x1 = xpoly_eval(xpoly_derivative(low[a][b][g], static_cast<int>(r)), p.tau, p.x);
                        Complex x2 = xpoly_eval(xpoly_derivative(low[r][b][g], static_cast<int>(a)), p.tau, p.x);
                        rep.potentiality = std::max(rep.potentiality, std::abs(x1 - x2) / scale);
                    }
        // intersection form from (g, ∘, E) and the metric from Lie_e
        CVec E(N, 0);
        for (size_t d = 1; d < N; ++d) E[d] = Real(t.degrees[d]) / Real(t.dn) * p.x[d - 1];
        for (size_t a = 0; a < N; ++a)
            for (size_t b = 0; b < N; ++b) {
                Complex v = 0;
                for (size_t a1 = 0; a1 < N; ++a1)
                    for (size_t b1 = 0; b1 < N; ++b1) {
                        Complex w = t.gUpper[a][a1] * t.gUpper[b][b1];
                        if (std::abs(w) <= 1e-12) continue;
                        for (size_t sg = 0; sg < N; ++sg) {
                            Complex gE = 0;
                            for (size_t d = 0; d < N; ++d) gE += E[d] * t.gLower[d][sg];
                            v += w * Cv[a1][b1][sg] * gE;
                        }
                    }
                Complex I = xpoly_eval(t.cI[a][b], p.tau, p.x);
                Real isc = std::max<Real>(1, std::abs(I));
                rep.intersection = std::max(rep.intersection, std::abs(v - I) / isc);
                Complex lie = t.unitScale * xpoly_eval(xpoly_derivative(t.cI[a][b], n), p.tau, p.x);
                rep.metricFromLie = std::max(rep.metricFromLie, std::abs(lie - t.gUpper[a][b]));
            }
    }
    return rep;
}

BasicInvariantSet perturb_top(const BasicInvariantSet& xs)
{
    BasicInvariantSet r = xs;
    size_t k = r.n() - 1;
    QSeries f = QSeries::from_terms({{Rational(0), Complex(1)}, {Rational(1), Complex(1)}}, std::nullopt);
    for (auto& [a, c] : r.x[k]) c = c * f;
    r.jets[k] *= f;
    r.good = false;
    return r;
}

FlatnessReport flatness_equivalences(const Setting& s, const BasicInvariantSet& xs, const FrobeniusTable* table)
{
    FlatnessReport rep;
    int n = s.n();
    auto G = gram_cache(s);
    Expander ex(s, xs);
    const Real tol = 1e-7;
    MultiIndex en2(static_cast<size_t>(n), 0);
    en2[static_cast<size_t>(n - 1)] = 2;

    for (int a = 0; a <= n; ++a)
        for (int b = a; b <= n; ++b) {
            auto jet = intersection_jet_with(s, xs, G, a, b);
            auto e = ex.run(jet, degree_of(s, a) + degree_of(s, b));
            Real sc = std::max<Real>(xpoly_norm(e.coeffs), 1e-300);
            auto d2 = xpoly_derivative(xpoly_derivative(e.coeffs, n), n);
            rep.vMembership = std::max(rep.vMembership, xpoly_norm(d2) / sc);
            if (a == n && b == n) {
                auto it = e.coeffs.find(en2);
                rep.unitCondition = it == e.coeffs.end() ? 0 : 2 * weighted_norm(it->second) / sc;
                MultiIndex zero(static_cast<size_t>(n), 0);
                rep.restriction = weighted_norm(jet.coeff(zero)) / std::max<Real>(weighted_norm(jet), 1e-300);
            }
        }
    {
        MultiIndex zero(static_cast<size_t>(n), 0);
        QSeries top = xs.jets[static_cast<size_t>(n - 1)].coeff(zero);
        rep.constantRestriction = weighted_norm(top.q_derivative()) / std::max<Real>(weighted_norm(top), 1e-300);
    }
    rep.holds[0] = rep.vMembership < tol;
    rep.holds[1] = rep.unitCondition < tol;
    rep.holds[2] = rep.restriction < tol;
    rep.holds[3] = rep.constantRestriction < tol;

    if (table) {
        // ψ(x^0) = z^0; ψ(x^α) is linear in z for a good set
        size_t N = static_cast<size_t>(n) + 1;
        std::vector<std::vector<QSeries>> P(N, std::vector<QSeries>(N, QSeries::zero()));
        P[0][0] = QSeries::constant(1);
        for (int a = 1; a <= n; ++a) {
            MultiIndex ea(static_cast<size_t>(n), 0);
            ea[static_cast<size_t>(a - 1)] = 1;
            auto ps = psi(xs, ea);
            for (int b = 1; b <= n; ++b) {
                MultiIndex e(static_cast<size_t>(n), 0);
                e[static_cast<size_t>(b - 1)] = 1;
                P[a][b] = ps.coeff(e);
            }
        }
        rep.isometry = 0;
        for (size_t a = 0; a < N; ++a)
            for (size_t b = 0; b < N; ++b) {
                QSeries gram = QSeries::zero();
                for (size_t g1 = 0; g1 < N; ++g1)
                    for (size_t g2 = 0; g2 < N; ++g2)
                        if (std::abs(G[g1][g2]) > 1e-12) gram += P[a][g1] * P[b][g2] * G[g1][g2];
                rep.isometry = std::max(rep.isometry,
                                        weighted_distance(gram, QSeries::constant(table->gLower[a][b] * table->unitScale)));
            }
    }
    return rep;
}

}  // namespace ellfrob
