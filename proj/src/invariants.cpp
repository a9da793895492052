#include "ellfrob/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace ellfrob {

Setting make_setting(const CartanType& type, const SettingOptions& opt)
{
    Setting s;
    s.sys = build(type);
    s.data = hyperbolic_coxeter(s.sys);
    s.sys = with_degrees(s.sys, s.data);
    s.qOrder = opt.qOrder;
    s.tol = opt.tol;
    s.seed = opt.seed;
    s.jetWeight = opt.jetWeight > 0 ? opt.jetWeight : 3 * s.data.dn;
    RegularPoint z = regular_point(s.sys, s.data, opt.seed);
    s.triplet = build_L(s.sys, s.data, z, opt.r);
    if (!s.triplet.admissibility.ok())
        throw std::runtime_error("make_setting: triplet is not admissible: " + s.triplet.admissibility.failures());
    if (opt.dualNormalize && s.data.codim == 1 && sgn(opt.r) == 0) s.triplet = dual_normalize(s.sys, s.data, s.triplet);
    return s;
}

ThetaTerm make_term(const Setting& s, RVec mu, Complex amp)
{
    ThetaTerm t;
    auto [ca, cd] = s.triplet.rad(mu);
    t.pL = -cd;
    t.amp = amp;
    t.lamp = amp * unit_phase(-ca);
    t.zc = s.triplet.zcoords(mu);
    t.mu = std::move(mu);
    return t;
}

Complex ThetaInvariant::eval(const YPoint& x) const { return eval_grad(x).first; }

std::pair<Complex, CVec> ThetaInvariant::eval_grad(const YPoint& x) const
{
    Complex v = 0;
    CVec g(x.values.size(), 0);
    for (const auto& t : terms) {
        Complex e = t.amp * std::exp(x.pair(t.mu));
        v += e;
        for (size_t i = 0; i < t.mu.size(); ++i)
            if (sgn(t.mu[i]) != 0) g[i] += to_real(t.mu[i]) * e;
    }
    return {v, g};
}

std::vector<RVec> fundamental_weights(const MarkedEllipticRootSystem& sys)
{
    size_t l = sys.l;
    // A_{kj} = ⟨α_k, α_j^∨⟩
    QMatrix A(l, l);
    for (size_t k = 0; k < l; ++k)
        for (size_t j = 0; j < l; ++j) A(k, j) = 2 * sys.gramFin(k, j) / sys.gramFin(j, j);
    auto inv = inverse(A);
    if (!inv) throw std::logic_error("fundamental_weights: singular Cartan matrix");
    std::vector<RVec> w(l, RVec(l));
    for (size_t i = 0; i < l; ++i)
        for (size_t k = 0; k < l; ++k) w[i][k] = (*inv)(i, k);
    return w;
}

std::vector<std::vector<int>> alcove_weights(const MarkedEllipticRootSystem& sys, int level)
{
    std::vector<std::vector<int>> out;
    std::vector<int> c(sys.l, 0);
    auto rec = [&](auto&& self, int i, int used) -> void {
        if (i == sys.l) {
            out.push_back(c);
            return;
        }
        for (c[i] = 0; used + c[i] * sys.marks[i + 1] <= level; ++c[i]) self(self, i + 1, used + c[i] * sys.marks[i + 1]);
        c[i] = 0;
    };
    rec(rec, 0, 0);
    return out;
}

int monomial_count(const std::vector<int>& degrees, int m)
{
    return static_cast<int>(multi_indices(degrees, m, true).size());
}

int span_dimension(const MarkedEllipticRootSystem& sys, const std::vector<int>& degrees, int m)
{
    int a = static_cast<int>(alcove_weights(sys, m).size());
    int b = monomial_count(degrees, m);
    if (a != b)
        throw std::runtime_error("span_dimension: " + std::to_string(a) + " alcove weights of level " +
                                 std::to_string(m) + " but " + std::to_string(b) + " monomials");
    return a;
}

namespace {

RVec weight_vector(const MarkedEllipticRootSystem& sys, const std::vector<int>& lambda)
{
    auto w = fundamental_weights(sys);
    RVec v(sys.l, Rational(0));
    for (int i = 0; i < sys.l; ++i)
        for (int k = 0; k < sys.l; ++k) v[k] += lambda[i] * w[i][k];
    return v;
}

Rational fin_norm(const MarkedEllipticRootSystem& sys, const RVec& fin)
{
    return bilinear(sys.gramFin, fin, fin);
}

}  // namespace

ThetaInvariant orbit_theta(const Setting& s, const std::vector<int>& lambda, int level, int qOrder, size_t maxTerms)
{
    const auto& sys = s.sys;
    ThetaInvariant f;
    f.degree = level;
    RVec lam = weight_vector(sys, lambda);
    if (level == 0) {
        if (!is_zero(lam)) throw std::invalid_argument("orbit_theta: level 0 requires λ = 0");
        f.terms.push_back(make_term(s, RVec(sys.dim(), Rational(0))));
        f.lowest = 0;
        f.complete = Rational(1L << 40);
        return f;
    }
    Rational theta = 0;
    for (int i = 0; i < sys.l; ++i) theta += lambda[i] * sys.marks[i + 1];
    if (theta > level) throw std::invalid_argument("orbit_theta: λ is not an alcove weight of this level");

    // simple affine roots α_1..α_l, −θ + δ and their reflection coefficients
    std::vector<RVec> roots;
    for (int i = 0; i < sys.l; ++i) roots.push_back(sys.basis_vector(i));
    {
        IVec mt(sys.highestRoot.size());
        for (size_t i = 0; i < mt.size(); ++i) mt[i] = -sys.highestRoot[i];
        roots.push_back(sys.embed(mt, 0, 1));
    }
    std::vector<RVec> coef;
    for (const auto& r : roots) {
        Rational nr = sys.form(r, r);
        RVec c(sys.dim(), Rational(0));
        for (size_t i = 0; i < sys.dim(); ++i)
            for (size_t j = 0; j < sys.dim(); ++j) c[i] += sys.gram(i, j) * r[j];
        for (auto& x : c) x = 2 * x / nr;
        coef.push_back(c);
    }

    // pL = p_std − ℓ·ν_fin − m·ρ_Λ, with p_std = (|ν_fin|² − |λ|²)/(2m)
    const QMatrix& inv = s.triplet.split.inv;
    size_t rowDelta = inv.rows() - 1;
    RVec ell(sys.l);
    for (int k = 0; k < sys.l; ++k) ell[k] = inv(rowDelta, k);
    Rational rhoL = inv(rowDelta, sys.iLambda());
    auto gi = inverse(sys.gramFin);
    Real kappa = std::sqrt(std::max<Real>(0, to_real(bilinear(*gi, ell, ell))));
    Real lam2 = to_real(fin_norm(sys, lam));
    Real m = level;
    auto stdBound = [&](Real T) {
        Real disc = m * m * kappa * kappa + lam2 + 2 * m * (T + m * to_real(rhoL));
        Real R = m * kappa + std::sqrt(std::max<Real>(0, disc));
        return (R * R - lam2) / (2 * m) + 1e-6;
    };
    auto pL_of = [&](const RVec& nu) {
        Rational c = 0;
        for (size_t i = 0; i < nu.size(); ++i)
            if (sgn(nu[i]) != 0) c += inv(rowDelta, i) * nu[i];
        return Rational(-c);
    };

    auto enumerate = [&](Real S) {
        RVec start(sys.dim(), Rational(0));
        for (int k = 0; k < sys.l; ++k) start[k] = lam[k];
        start[sys.iLambda()] = level;
        std::set<RVec> seen{start};
        std::deque<RVec> queue{start};
        std::vector<RVec> out;
        while (!queue.empty()) {
            RVec nu = std::move(queue.front());
            queue.pop_front();
            for (size_t r = 0; r < roots.size(); ++r) {
                Rational k = 0;
                for (size_t i = 0; i < nu.size(); ++i)
                    if (sgn(coef[r][i]) != 0 && sgn(nu[i]) != 0) k += coef[r][i] * nu[i];
                if (sgn(k) == 0) continue;
                RVec nv = nu;
                for (size_t i = 0; i < nv.size(); ++i)
                    if (sgn(roots[r][i]) != 0) nv[i] -= k * roots[r][i];
                if (to_real(-nv[sys.idelta()]) > S) continue;
                if (seen.insert(nv).second) {
                    if (seen.size() > maxTerms)
                        throw OrbitTooLarge("orbit_theta: more than " + std::to_string(maxTerms) +
                                            " orbit elements below q-exponent " + std::to_string(S));
                    queue.push_back(nv);
                }
            }
            out.push_back(std::move(nu));
        }
        return out;
    };

    // locate the lowest L-exponent first, then enumerate qOrder units above it
    Real T = -lam2 / (2 * m) - m * kappa * kappa / 2 - m * to_real(rhoL) + 1;
    std::optional<Rational> lowest;
    for (int iter = 0; iter < 64 && !lowest; ++iter, T += 1) {
        for (const auto& nu : enumerate(stdBound(T))) {
            Rational p = pL_of(nu);
            if (to_real(p) < T && (!lowest || p < *lowest)) lowest = p;
        }
    }
    if (!lowest) throw std::logic_error("orbit_theta: could not locate the lowest exponent");
    f.lowest = *lowest;
    f.complete = *lowest + qOrder;
    for (auto& nu : enumerate(stdBound(to_real(f.complete)))) {
        Rational p = pL_of(nu);
        if (p < f.complete) f.terms.push_back(make_term(s, std::move(nu)));
    }
    std::sort(f.terms.begin(), f.terms.end(), [](const ThetaTerm& a, const ThetaTerm& b) { return a.pL < b.pL; });
    return f;
}

QJet taylor_jet(const Setting& s, const ThetaInvariant& f, int maxWeight)
{
    const auto& d = s.degrees();
    QJet j(d, maxWeight);
    auto idx = multi_indices(d, maxWeight);
    if (f.terms.empty()) {
        for (const auto& b : idx) j.set(b, QSeries::zero(f.complete));
        return j;
    }
    Rational lo = f.terms.front().pL;
    long den = 1;
    for (const auto& t : f.terms) den = std::lcm(den, Rational(t.pL - lo).get_den().get_si());
    std::vector<size_t> pos;
    size_t K = 0;
    for (const auto& t : f.terms) {
        pos.push_back(Rational((t.pL - lo) * den).get_num().get_ui());
        K = std::max(K, pos.back() + 1);
    }
    size_t n = d.size();
    std::vector<std::vector<Complex>> acc(idx.size(), std::vector<Complex>(K, 0));
    std::vector<std::vector<Complex>> pw(n);
    for (size_t t = 0; t < f.terms.size(); ++t) {
        const auto& term = f.terms[t];
        for (size_t b = 0; b < n; ++b) {
            int maxp = maxWeight / d[b];
            pw[b].assign(maxp + 1, 1);
            for (int k = 1; k <= maxp; ++k) pw[b][k] = pw[b][k - 1] * term.zc[b];
        }
        for (size_t i = 0; i < idx.size(); ++i) {
            Complex v = term.lamp;
            for (size_t b = 0; b < n; ++b)
                if (idx[i][b]) v *= pw[b][idx[i][b]];
            acc[i][pos[t]] += v;
        }
    }
    for (size_t i = 0; i < idx.size(); ++i) {
        Real fac = factorial(idx[i]);
        for (auto& c : acc[i]) c /= fac;
        j.set(idx[i], QSeries::from_grid(lo, den, std::move(acc[i]), f.complete));
    }
    return j;
}

namespace {

std::vector<MultiIndex> monomials_over(const std::vector<int>& d, int m, const std::vector<bool>& allowed)
{
    std::vector<MultiIndex> out;
    for (auto& a : multi_indices(d, m, true)) {
        bool ok = true;
        for (size_t i = 0; i < a.size(); ++i)
            if (a[i] && !allowed[i]) ok = false;
        if (ok) out.push_back(a);
    }
    return out;
}

// Gaussian elimination rank of columns over the Laurent series field
struct RankTracker {
    explicit RankTracker(Real r) : rel(r) {}
    Real rel;
    std::vector<std::vector<QSeries>> reduced;  // reduced columns
    std::vector<size_t> pivotRow;
    Real scale = 0;

    bool try_add(std::vector<QSeries> col)
    {
        for (const auto& f : col) scale = std::max(scale, f.max_abs());
        Real thr = rel * scale;
        for (size_t k = 0; k < reduced.size(); ++k) {
            size_t r = pivotRow[k];
            if (col[r].coeffs().empty()) continue;
            QSeries f = col[r] * reduced[k][r].inverse(thr);
            for (size_t i = 0; i < col.size(); ++i) col[i] -= f * reduced[k][i];
        }
        size_t best = col.size();
        Rational bv;
        for (size_t i = 0; i < col.size(); ++i) {
            bool used = std::find(pivotRow.begin(), pivotRow.end(), i) != pivotRow.end();
            if (used) continue;
            auto v = col[i].valuation(thr);
            if (v && (best == col.size() || *v < bv)) {
                best = i;
                bv = *v;
            }
        }
        if (best == col.size()) return false;
        reduced.push_back(std::move(col));
        pivotRow.push_back(best);
        return true;
    }
};

std::vector<QSeries> piece_vector(const QJet& j, const std::vector<MultiIndex>& rows)
{
    std::vector<QSeries> v;
    for (const auto& b : rows) v.push_back(j.coeff(b));
    return v;
}

}  // namespace

QJet poly_jet(const BasicInvariantSet& xs, const InvPoly& p, int maxWeight)
{
    QJet out(xs.degrees, maxWeight);
    auto& cache = *xs.rawCache;
    for (const auto& [a, c] : p) {
        auto key = std::make_pair(a, maxWeight);
        auto it = cache.find(key);
        if (it == cache.end()) {
            QJet m = QJet::one(xs.degrees, maxWeight);
            for (size_t i = 0; i < a.size(); ++i)
                for (int k = 0; k < a[i]; ++k) m = jet_product(m, xs.rawJets[i].truncated(maxWeight));
            it = cache.emplace(key, std::move(m)).first;
        }
        out += it->second * c;
    }
    return out;
}

QJet monomial_jet(const BasicInvariantSet& xs, const MultiIndex& a, int maxWeight)
{
    QJet m = QJet::one(xs.degrees, maxWeight);
    for (size_t i = 0; i < a.size(); ++i)
        for (int k = 0; k < a[i]; ++k) m = jet_product(m, xs.jets[i].truncated(maxWeight));
    return m;
}

BasicInvariantSet select_basic(const Setting& s)
{
    BasicInvariantSet xs;
    const auto& d = s.degrees();
    size_t n = d.size();
    xs.degrees = d;
    xs.raw.resize(n);
    xs.rawWeights.resize(n);
    xs.rawJets.resize(n);
    std::vector<bool> chosen(n, false);
    std::vector<int> distinct(d.begin(), d.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (int m : distinct) {
        std::vector<size_t> slots;
        for (size_t a = 0; a < n; ++a)
            if (d[a] == m) slots.push_back(a);
        auto rows = multi_indices(d, m, true);
        RankTracker rank(1e-8);
        std::vector<bool> lower(n, false);
        for (size_t a = 0; a < n; ++a) lower[a] = chosen[a] && d[a] < m;
        for (const auto& a : monomials_over(d, m, lower)) {
            QJet pj = QJet::one(d, m);
            for (size_t i = 0; i < n; ++i)
                for (int k = 0; k < a[i]; ++k) pj = jet_product(pj, xs.rawJets[i].truncated(m));
            if (!rank.try_add(piece_vector(pj, rows)))
                throw std::runtime_error("select_basic: products of lower generators are dependent in degree " +
                                         std::to_string(m));
        }
        size_t next = 0;
        for (const auto& lam : alcove_weights(s.sys, m)) {
            if (next == slots.size()) break;
            ThetaInvariant f = orbit_theta(s, lam, m, s.qOrder);
            QJet j = taylor_jet(s, f, s.jetWeight);
            if (!rank.try_add(piece_vector(j.truncated(m), rows))) continue;
            size_t a = slots[next++];
            xs.raw[a] = std::move(f);
            xs.rawWeights[a] = lam;
            xs.rawJets[a] = std::move(j);
            chosen[a] = true;
        }
        if (next != slots.size())
            throw std::runtime_error("select_basic: orbit sums of level " + std::to_string(m) + " reach rank " +
                                     std::to_string(rank.reduced.size()) + ", need " + std::to_string(rows.size()));
    }
    for (size_t a = 0; a < n; ++a) {
        MultiIndex e(n, 0);
        e[a] = 1;
        xs.x.push_back({{e, QSeries::constant(1)}});
        xs.jets.push_back(xs.rawJets[a]);
    }
    // the Jacobian at L^⊥ must be invertible
    QMatrixS J = jacobian(xs);
    QMatrixS I(n, std::vector<QSeries>(n));
    for (size_t a = 0; a < n; ++a) I[a][a] = QSeries::constant(1);
    qsolve(J, I);
    return xs;
}

QMatrixS jacobian(const BasicInvariantSet& xs)
{
    size_t n = xs.n();
    QMatrixS J(n, std::vector<QSeries>(n));
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b) {
            MultiIndex e(n, 0);
            e[b] = 1;
            J[a][b] = xs.jets[a].coeff(e);
        }
    return J;
}

QJet phi(const BasicInvariantSet& xs, const MultiIndex& a, int maxWeight)
{
    QJet m = QJet::one(xs.degrees, maxWeight);
    MultiIndex zero(xs.n(), 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        QJet r = xs.jets[i].truncated(maxWeight);
        r.set(zero, QSeries::zero(r.coeff(zero).precision()));
        for (int k = 0; k < a[i]; ++k) m = jet_product(m, r);
    }
    return m;
}

QJet psi(const BasicInvariantSet& xs, const MultiIndex& a)
{
    int w = weight(a, xs.degrees);
    return phi(xs, a, w).piece(w);
}

PsiMatrix psi_matrix(const BasicInvariantSet& xs, int m)
{
    PsiMatrix pm;
    pm.rows = multi_indices(xs.degrees, m, true);
    pm.cols = pm.rows;
    pm.M.assign(pm.rows.size(), std::vector<QSeries>(pm.cols.size()));
    for (size_t c = 0; c < pm.cols.size(); ++c) {
        QJet p = psi(xs, pm.cols[c]);
        for (size_t r = 0; r < pm.rows.size(); ++r) pm.M[r][c] = p.coeff(pm.rows[r]);
    }
    return pm;
}

InvPoly poly_mul(const InvPoly& a, const InvPoly& b)
{
    InvPoly out;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            MultiIndex e(ea.size());
            for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            auto it = out.find(e);
            if (it == out.end())
                out.emplace(e, ca * cb);
            else
                it->second += ca * cb;
        }
    return out;
}

InvPoly compose(const BasicInvariantSet& xs, const InvPoly& inX)
{
    InvPoly out;
    size_t n = xs.n();
    for (const auto& [a, c] : inX) {
        InvPoly m{{MultiIndex(n, 0), c}};
        for (size_t i = 0; i < n; ++i)
            for (int k = 0; k < a[i]; ++k) m = poly_mul(m, xs.x[i]);
        for (auto& [e, f] : m) {
            auto it = out.find(e);
            if (it == out.end())
                out.emplace(e, f);
            else
                it->second += f;
        }
    }
    return out;
}

BasicInvariantSet make_good(const Setting& s, const BasicInvariantSet& xs)
{
    BasicInvariantSet g = xs;
    size_t n = xs.n();
    std::vector<int> distinct(xs.degrees.begin(), xs.degrees.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (int m : distinct) {
        PsiMatrix pm = psi_matrix(xs, m);
        std::vector<size_t> alphas;
        for (size_t a = 0; a < n; ++a)
            if (xs.degrees[a] == m) alphas.push_back(a);
        QMatrixS rhs(pm.rows.size(), std::vector<QSeries>(alphas.size()));
        for (size_t k = 0; k < alphas.size(); ++k) {
            MultiIndex e(n, 0);
            e[alphas[k]] = 1;
            for (size_t r = 0; r < pm.rows.size(); ++r)
                if (pm.rows[r] == e) rhs[r][k] = QSeries::constant(1);
        }
        QMatrixS C = qsolve(pm.M, rhs);
        for (size_t k = 0; k < alphas.size(); ++k) {
            InvPoly inX;
            QJet jet(xs.degrees, s.jetWeight);
            for (size_t c = 0; c < pm.cols.size(); ++c) {
                inX[pm.cols[c]] = C[c][k];
                jet += monomial_jet(xs, pm.cols[c], s.jetWeight) * C[c][k];
            }
            g.x[alphas[k]] = compose(xs, inX);
            g.jets[alphas[k]] = std::move(jet);
        }
    }
    GoodReport rep = check_good(s, g);
    g.good = rep.goodness < s.tol && rep.z0Property < s.tol;
    g.compatible = rep.compatibility < s.tol;
    if (!rep.ok(s.tol))
    {
        std::ostringstream os;
        os.precision(3);
        os << "make_good: residuals goodness " << rep.goodness << ", compatibility " << rep.compatibility
           << ", δ-property " << rep.deltaProperty << ", z^0-property " << rep.z0Property << ", ψ " << rep.psiIdentity;
        throw std::runtime_error(os.str());
    }
    return g;
}

bool GoodReport::ok(Real tol) const
{
    return goodness < tol && compatibility < tol && deltaProperty < tol && z0Property < tol && psiIdentity < tol;
}

GoodReport check_good(const Setting& s, const BasicInvariantSet& xs)
{
    GoodReport rep;
    size_t n = xs.n();
    const auto& d = xs.degrees;
    for (size_t a = 0; a < n; ++a) {
        QJet piece = xs.jets[a].piece(d[a]);
        Real scale = std::max<Real>(1, weighted_norm(piece));
        for (const auto& [b, f] : piece.terms()) {
            if (total_degree(b) >= 2) rep.goodness = std::max(rep.goodness, weighted_norm(f) / scale);
            rep.z0Property = std::max(rep.z0Property, weighted_norm(f.q_derivative()) / scale);
        }
        MultiIndex e(n, 0);
        e[a] = 1;
        QJet want(d, d[a]);
        want.set(e, QSeries::constant(1));
        rep.psiIdentity = std::max(rep.psiIdentity, weighted_distance(psi(xs, e), want));
    }
    QMatrixS J = jacobian(xs);
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b)
            rep.compatibility =
                std::max(rep.compatibility, weighted_distance(J[a][b], QSeries::constant(a == b ? 1 : 0)));
    for (int m = 1; m <= 2 * s.dn(); ++m) {
        PsiMatrix pm = psi_matrix(xs, m);
        for (size_t r = 0; r < pm.rows.size(); ++r)
            for (size_t c = 0; c < pm.cols.size(); ++c)
                rep.deltaProperty =
                    std::max(rep.deltaProperty, weighted_distance(pm.M[r][c], QSeries::constant(r == c ? 1 : 0)));
    }
    return rep;
}

PointEval evaluate_generators(const Setting& s, const BasicInvariantSet& xs, const YPoint& x)
{
    PointEval pe;
    pe.tau = x.values[s.sys.idelta()] / (-kTwoPiI);
    for (const auto& f : xs.raw) {
        auto [v, g] = f.eval_grad(x);
        pe.y.push_back(v);
        pe.dy.push_back(std::move(g));
    }
    return pe;
}

std::pair<Complex, CVec> eval_poly(const Setting& s, const PointEval& pe, const InvPoly& p)
{
    size_t dim = s.sys.dim();
    Complex v = 0;
    CVec g(dim, 0);
    CVec dtau(dim, 0);
    dtau[s.sys.idelta()] = Complex(1) / (-kTwoPiI);
    for (const auto& [a, c] : p) {
        Complex cv = c.eval(pe.tau);
        Complex dc = kTwoPiI * c.q_derivative().eval(pe.tau);
        Complex mono = 1;
        for (size_t i = 0; i < a.size(); ++i)
            for (int k = 0; k < a[i]; ++k) mono *= pe.y[i];
        v += cv * mono;
        for (size_t j = 0; j < dim; ++j) g[j] += dc * mono * dtau[j];
        for (size_t i = 0; i < a.size(); ++i) {
            if (!a[i]) continue;
            Complex part = cv * Real(a[i]);
            for (size_t k = 0; k < a.size(); ++k)
                for (int t = 0; t < a[k] - (k == i ? 1 : 0); ++t) part *= pe.y[k];
            for (size_t j = 0; j < dim; ++j) g[j] += part * pe.dy[i][j];
        }
    }
    return {v, g};
}

std::vector<YPoint> sample_points(const Setting& s, int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<YPoint> pts;
    for (int i = 0; i < count; ++i) {
        // Im τ ∈ [0.48, 0.8]: |q| ≤ 0.05, where the truncated coefficient series of good invariants
        // (which grow like 1/Δ) are accurate to roundoff
        Complex tau(u(rng) - 0.5, 0.48 + 0.32 * u(rng));
        CVec w;
        for (int b = 0; b < s.n(); ++b) w.push_back(std::polar<Real>(0.2 * u(rng), 2 * kPi * u(rng)));
        pts.push_back(point_from_coords(s.sys, s.triplet, tau, w));
    }
    return pts;
}

std::vector<QMatrix> weyl_generators(const MarkedEllipticRootSystem& sys)
{
    std::vector<QMatrix> g;
    for (int i = 0; i < sys.l; ++i) g.push_back(reflection(sys, sys.basis_vector(i)).matrix());
    IVec mt(sys.highestRoot.size());
    for (size_t i = 0; i < mt.size(); ++i) mt[i] = -sys.highestRoot[i];
    g.push_back(reflection(sys, sys.embed(mt, 0, 1)).matrix());
    for (int i = 0; i < sys.l; ++i) {
        IVec e(sys.l, 0);
        e[i] = 1;
        g.push_back(reflection(sys, sys.embed(e, 1, 0)).matrix());
    }
    return g;
}

InvarianceReport invariance_check(const Setting& s, const ThetaInvariant& f, const std::vector<YPoint>& pts)
{
    InvarianceReport rep;
    auto gens = weyl_generators(s.sys);
    auto uinv = inverse(s.data.unip.matrix());
    Complex zm = to_complex(s.triplet.zeta_power(-f.degree));
    for (const auto& x : pts) {
        Real scale = 0;
        for (const auto& t : f.terms) scale += std::abs(t.amp * std::exp(x.pair(t.mu)));
        scale = std::max(scale, Real(1e-300));
        Complex fx = f.eval(x);
        for (const auto& g : gens) rep.worstReflection = std::max(rep.worstReflection, std::abs(f.eval(act(g, x)) - fx) / scale);
        rep.worstUnip = std::max(rep.worstUnip, std::abs(f.eval(act(*uinv, x)) - zm * fx) / scale);
    }
    return rep;
}

QJet jet_derivative(const Setting& s, const QJet& j, int beta)
{
    if (beta == 0) {
        QJet r(j.weights(), j.max_weight());
        for (const auto& [b, f] : j.terms()) r.set(b, f.q_derivative() * kTwoPiI);
        return r;
    }
    size_t k = static_cast<size_t>(beta - 1);
    QJet r(j.weights(), j.max_weight() - s.degrees()[k]);
    for (const auto& [b, f] : j.terms()) {
        if (b[k] == 0) continue;
        MultiIndex c = b;
        --c[k];
        r.set(c, f * Complex(b[k]));
    }
    return r;
}

Real euler_jet_residual(const Setting& s, const QJet& j, int m)
{
    QJet dz = jet_derivative(s, j, s.n());
    QJet want = j.truncated(dz.max_weight()) * (Complex(m) / (-kTwoPiI));
    Real scale = std::max<Real>(1, weighted_norm(want));
    return weighted_distance(dz, want) / scale;
}

}  // namespace ellfrob

namespace ellfrob {

ExchangeHeader exchange_header(const Setting& s, bool good)
{
    ExchangeHeader h;
    h.type = s.sys.type.label();
    h.l = s.sys.l;
    h.degrees = s.degrees();
    h.r = s.triplet.r;
    h.seed = s.seed;
    h.qOrder = s.qOrder;
    h.jetWeight = s.jetWeight;
    h.dn = s.dn();
    h.zetaExponent = s.triplet.zetaExponent;
    h.signature = s.triplet.signature.str();
    h.dualNormalized = s.triplet.dualNormalized;
    h.good = good;
    return h;
}

void write_exchange(std::ostream& os, const ExchangeHeader& h, const std::vector<ExchangeBlock>& blocks)
{
    os << "ellfrob-invariants 1\n";
    os << "type " << h.type << "\n";
    os << "l " << h.l << "\n";
    os << "degrees";
    for (int d : h.degrees) os << " " << d;
    os << "\n";
    os << "r " << to_string(h.r) << "\n";
    os << "seed " << h.seed << "\n";
    os << "N " << h.qOrder << "\n";
    os << "J " << h.jetWeight << "\n";
    os << "dn " << h.dn << "\n";
    os << "zeta_exponent " << h.zetaExponent << "\n";
    os << "signature " << h.signature << "\n";
    os << "dual_normalized " << (h.dualNormalized ? 1 : 0) << "\n";
    os << "good " << (h.good ? 1 : 0) << "\n";
    os << "count " << blocks.size() << "\n";
    for (size_t i = 0; i < blocks.size(); ++i) {
        std::ostringstream rows;
        write_rows(rows, blocks[i].jet);
        std::string text = rows.str();
        long lines = std::count(text.begin(), text.end(), '\n');
        os << "invariant " << i + 1 << " degree " << blocks[i].degree << " rows " << lines << "\n" << text;
    }
}

ExchangeFile read_exchange(std::istream& is)
{
    ExchangeFile f;
    auto& h = f.header;
    std::string line;
    auto fail = [](const std::string& why) { throw std::runtime_error("exchange file: " + why); };
    if (!std::getline(is, line) || line.rfind("ellfrob-invariants", 0) != 0) fail("missing magic line");
    size_t count = 0;
    bool haveCount = false;
    while (!haveCount && std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "type")
            ls >> h.type;
        else if (key == "l")
            ls >> h.l;
        else if (key == "degrees") {
            int d;
            while (ls >> d) h.degrees.push_back(d);
            if (!ls.eof()) fail("malformed degrees line '" + line + "'");
            continue;
        } else if (key == "r") {
            std::string v;
            ls >> v;
            h.r = parse_rational(v);
        } else if (key == "seed")
            ls >> h.seed;
        else if (key == "N")
            ls >> h.qOrder;
        else if (key == "J")
            ls >> h.jetWeight;
        else if (key == "dn")
            ls >> h.dn;
        else if (key == "zeta_exponent")
            ls >> h.zetaExponent;
        else if (key == "signature")
            std::getline(ls >> std::ws, h.signature);
        else if (key == "dual_normalized") {
            int v = 0;
            ls >> v;
            h.dualNormalized = v != 0;
        } else if (key == "good") {
            int v = 0;
            ls >> v;
            h.good = v != 0;
        } else if (key == "count") {
            ls >> count;
            haveCount = true;
        } else
            fail("unknown header key '" + key + "'");
        if (ls.fail()) fail("malformed header line '" + line + "'");
    }
    if (!haveCount) fail("missing count");
    if (h.type.empty() || h.degrees.empty() || h.jetWeight <= 0) fail("incomplete header");
    for (size_t i = 0; i < count; ++i) {
        if (!std::getline(is, line)) fail("missing invariant block");
        std::istringstream ls(line);
        std::string w1, w2, w3;
        size_t idx = 0;
        long rows = 0;
        ExchangeBlock b;
        ls >> w1 >> idx >> w2 >> b.degree >> w3 >> rows;
        if (ls.fail() || w1 != "invariant" || w2 != "degree" || w3 != "rows" || rows < 0)
            fail("bad block header '" + line + "'");
        std::string text;
        for (long k = 0; k < rows; ++k) {
            if (!std::getline(is, line)) fail("truncated block " + std::to_string(idx));
            text += line + "\n";
        }
        std::istringstream rs(text);
        b.jet = read_rows(rs, h.degrees, h.jetWeight);
        f.blocks.push_back(std::move(b));
    }
    return f;
}

}  // namespace ellfrob
