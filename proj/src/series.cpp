#include "ellfrob/series.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace ellfrob {

namespace {

using OptQ = std::optional<Rational>;

OptQ min_prec(const OptQ& a, const OptQ& b)
{
    if (!a) return b;
    if (!b) return a;
    return std::min(*a, *b);
}

OptQ add_prec(const OptQ& a, const OptQ& b)
{
    if (!a || !b) return {};
    return *a + *b;
}

long lcm_den(long a, long b) { return std::lcm(a, b); }

long den_of(const Rational& x) { return x.get_den().get_si(); }

}  // namespace

QSeries QSeries::constant(Complex c) { return monomial(c, Rational(0)); }

QSeries QSeries::monomial(Complex c, const Rational& e, std::optional<Rational> prec)
{
    QSeries f;
    f.lead_ = e;
    f.c_ = {c};
    f.prec_ = std::move(prec);
    f.clip();
    return f;
}

QSeries QSeries::zero(std::optional<Rational> prec)
{
    QSeries f;
    f.prec_ = std::move(prec);
    return f;
}

QSeries QSeries::from_terms(const std::vector<std::pair<Rational, Complex>>& terms, std::optional<Rational> prec)
{
    QSeries f;
    f.prec_ = std::move(prec);
    std::vector<const std::pair<Rational, Complex>*> kept;
    for (const auto& t : terms)
        if (!f.prec_ || t.first < *f.prec_) kept.push_back(&t);
    if (kept.empty()) return f;
    Rational lo = kept.front()->first;
    for (auto* t : kept) lo = std::min(lo, t->first);
    long d = 1;
    for (auto* t : kept) d = lcm_den(d, den_of(t->first - lo));
    f.lead_ = lo;
    f.den_ = d;
    for (auto* t : kept) {
        Rational k = (t->first - lo) * d;
        size_t i = k.get_num().get_ui();
        if (i >= f.c_.size()) f.c_.resize(i + 1, 0);
        f.c_[i] += t->second;
    }
    return f;
}

QSeries QSeries::from_grid(Rational lead, long den, std::vector<Complex> coeffs, std::optional<Rational> prec)
{
    QSeries f;
    f.lead_ = std::move(lead);
    f.den_ = den;
    f.c_ = std::move(coeffs);
    f.prec_ = std::move(prec);
    f.clip();
    return f;
}

Complex QSeries::coeff(const Rational& e) const
{
    if (c_.empty()) return 0;
    Rational k = (e - lead_) * den_;
    if (k.get_den() != 1 || sgn(k) < 0) return 0;
    if (k >= static_cast<long>(c_.size())) return 0;
    return c_[k.get_num().get_ui()];
}

Real QSeries::max_abs() const
{
    Real m = 0;
    for (const auto& c : c_) m = std::max(m, std::abs(c));
    return m;
}

std::optional<Rational> QSeries::valuation(Real threshold) const
{
    for (size_t k = 0; k < c_.size(); ++k)
        if (std::abs(c_[k]) > threshold) return exponent(k);
    return {};
}

long QSeries::order() const
{
    if (!prec_) return -1;
    Rational r = *prec_ - lead_;
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return f.get_si();
}

void QSeries::regrid(const Rational& lead, long den)
{
    if (lead == lead_ && den == den_) return;
    long step = den / den_;
    Rational off = (lead_ - lead) * den;
    if (off.get_den() != 1 || sgn(off) < 0 || den % den_ != 0) throw std::logic_error("QSeries::regrid: incompatible grid");
    size_t o = off.get_num().get_ui();
    std::vector<Complex> c(c_.empty() ? 0 : o + (c_.size() - 1) * step + 1, 0);
    for (size_t k = 0; k < c_.size(); ++k) c[o + k * step] = c_[k];
    c_ = std::move(c);
    lead_ = lead;
    den_ = den;
}

void QSeries::clip()
{
    if (!prec_) return;
    while (!c_.empty() && exponent(c_.size() - 1) >= *prec_) c_.pop_back();
}

QSeries QSeries::truncated(const Rational& prec) const
{
    QSeries f = *this;
    f.prec_ = min_prec(f.prec_, prec);
    f.clip();
    return f;
}

Complex QSeries::eval(Complex tau) const
{
    Complex s = 0;
    for (size_t k = 0; k < c_.size(); ++k)
        if (c_[k] != Complex(0)) s += c_[k] * std::exp(kTwoPiI * tau * to_real(exponent(k)));
    return s;
}

QSeries QSeries::q_derivative() const
{
    QSeries f = *this;
    for (size_t k = 0; k < f.c_.size(); ++k) f.c_[k] *= to_real(exponent(k));
    return f;
}

QSeries QSeries::inverse(Real threshold) const
{
    auto v = valuation(threshold);
    if (!v) throw NonUnitPivot("QSeries::inverse: series is zero within tolerance", 0);
    size_t kv = Rational((*v - lead_) * den_).get_num().get_ui();
    QSeries g;
    g.lead_ = -*v;
    g.den_ = den_;
    if (!prec_) {
        bool monomial = true;
        for (size_t k = kv + 1; k < c_.size(); ++k)
            if (c_[k] != Complex(0)) monomial = false;
        if (!monomial) throw std::invalid_argument("QSeries::inverse: exact non-monomial series has no finite inverse");
        g.c_ = {Complex(1) / c_[kv]};
        return g;
    }
    Rational rel = *prec_ - *v;
    g.prec_ = -*v + rel;
    Rational kk = rel * den_;
    mpz_class kc;
    mpz_cdiv_q(kc.get_mpz_t(), kk.get_num_mpz_t(), kk.get_den_mpz_t());
    size_t K = kc.get_ui();
    Complex c0inv = Complex(1) / c_[kv];
    g.c_.assign(K, 0);
    for (size_t k = 0; k < K; ++k) {
        Complex s = k == 0 ? Complex(1) : Complex(0);
        for (size_t j = 1; j <= k && kv + j < c_.size(); ++j) s -= c_[kv + j] * g.c_[k - j];
        g.c_[k] = s * c0inv;
    }
    g.clip();
    return g;
}

QSeries QSeries::operator-() const
{
    QSeries f = *this;
    for (auto& c : f.c_) c = -c;
    return f;
}

QSeries& QSeries::operator+=(const QSeries& o)
{
    prec_ = min_prec(prec_, o.prec_);
    if (!o.c_.empty()) {
        if (c_.empty()) {
            lead_ = o.lead_;
            den_ = o.den_;
            c_.assign(o.c_.size(), 0);
        }
        Rational lo = std::min(lead_, o.lead_);
        long d = lcm_den(lcm_den(den_, o.den_), den_of(lead_ - o.lead_));
        regrid(lo, d);
        QSeries t = o;
        t.regrid(lo, d);
        if (t.c_.size() > c_.size()) c_.resize(t.c_.size(), 0);
        for (size_t k = 0; k < t.c_.size(); ++k) c_[k] += t.c_[k];
    }
    clip();
    return *this;
}

QSeries& QSeries::operator-=(const QSeries& o) { return *this += -o; }

QSeries& QSeries::operator*=(Complex s)
{
    for (auto& c : c_) c *= s;
    return *this;
}

QSeries operator*(const QSeries& a, const QSeries& b)
{
    // a lower bound for the support; an empty series is zero below its precision
    auto low = [](const QSeries& x) -> OptQ {
        if (!x.c_.empty()) return x.lead_;
        return x.prec_;
    };
    QSeries r;
    r.prec_ = min_prec(add_prec(a.prec_, low(b)), add_prec(b.prec_, low(a)));
    if (a.c_.empty() || b.c_.empty()) return r;
    long d = lcm_den(a.den_, b.den_);
    long sa = d / a.den_, sb = d / b.den_;
    r.lead_ = a.lead_ + b.lead_;
    r.den_ = d;
    size_t K = (a.c_.size() - 1) * sa + (b.c_.size() - 1) * sb + 1;
    if (r.prec_) {
        Rational kk = (*r.prec_ - r.lead_) * d;
        mpz_class kc;
        mpz_cdiv_q(kc.get_mpz_t(), kk.get_num_mpz_t(), kk.get_den_mpz_t());
        K = std::min<size_t>(K, std::max<long>(0, kc.get_si()));
    }
    r.c_.assign(K, 0);
    for (size_t i = 0; i < a.c_.size() && i * sa < K; ++i) {
        if (a.c_[i] == Complex(0)) continue;
        for (size_t j = 0; j < b.c_.size(); ++j) {
            size_t k = i * sa + j * sb;
            if (k >= K) break;
            r.c_[k] += a.c_[i] * b.c_[j];
        }
    }
    r.clip();
    return r;
}

Real distance(const QSeries& a, const QSeries& b) { return (a - b).max_abs(); }

Real weighted_norm(const QSeries& f, Real rho)
{
    Real m = 0;
    for (size_t k = 0; k < f.coeffs().size(); ++k)
        if (f.coeffs()[k] != Complex(0)) m = std::max(m, std::abs(f.coeffs()[k]) * std::pow(rho, to_real(f.exponent(k))));
    return m;
}

Real weighted_distance(const QSeries& a, const QSeries& b, Real rho) { return weighted_norm(a - b, rho); }

std::string to_string(const QSeries& f, int maxTerms)
{
    std::ostringstream os;
    os << std::setprecision(6);
    int shown = 0;
    for (size_t k = 0; k < f.coeffs().size() && shown < maxTerms; ++k) {
        if (std::abs(f.coeffs()[k]) < 1e-14) continue;
        if (shown++) os << " + ";
        os << "(" << f.coeffs()[k].real() << (f.coeffs()[k].imag() < 0 ? "" : "+") << f.coeffs()[k].imag() << "i)q^"
           << to_string(f.exponent(k));
    }
    if (!shown) os << "0";
    if (f.precision()) os << " + O(q^" << to_string(*f.precision()) << ")";
    return os.str();
}

namespace {

QMatrixS qsolve_elimination(const QMatrixS& M, const QMatrixS& B, Real rel)
{
    size_t n = M.size();
    if (B.size() != n) throw std::invalid_argument("qsolve: shape mismatch");
    size_t m = B.empty() ? 0 : B[0].size();
    Real scale = 0;
    for (const auto& row : M)
        for (const auto& f : row) scale = std::max(scale, f.max_abs());
    Real thr = rel * std::max(scale, Real(1e-300));
    QMatrixS A = M, X = B;
    for (size_t k = 0; k < n; ++k) {
        size_t piv = n;
        Rational best;
        Real bestAbs = 0;
        for (size_t i = k; i < n; ++i) {
            auto v = A[i][k].valuation(thr);
            if (!v) continue;
            Real ab = std::abs(A[i][k].coeff(*v));
            if (piv == n || *v < best || (*v == best && ab > bestAbs)) {
                piv = i;
                best = *v;
                bestAbs = ab;
            }
        }
        if (piv == n)
            throw NonUnitPivot("qsolve: no unit pivot in column " + std::to_string(k), static_cast<int>(k));
        std::swap(A[k], A[piv]);
        std::swap(X[k], X[piv]);
        QSeries inv = A[k][k].inverse(thr);
        for (size_t j = k; j < n; ++j) A[k][j] = A[k][j] * inv;
        for (size_t j = 0; j < m; ++j) X[k][j] = X[k][j] * inv;
        for (size_t i = 0; i < n; ++i) {
            if (i == k || A[i][k].coeffs().empty()) continue;
            QSeries f = A[i][k];
            for (size_t j = k; j < n; ++j) A[i][j] -= f * A[k][j];
            for (size_t j = 0; j < m; ++j) X[i][j] -= f * X[k][j];
        }
    }
    return X;
}

// Column-balanced solve: with c_j the lowest exponent of column j, M = M'·diag(q^c) and M' = Σ_k M'_k q^{k/D}.
// If M'_0 is invertible, X' = M'^{-1}B follows from the recurrence M'_0 X'_k = B_k − Σ_{j≥1} M'_j X'_{k−j},
// whose error grows only like the solution itself.
std::optional<QMatrixS> qsolve_balanced(const QMatrixS& M, const QMatrixS& B, Real rel)
{
    size_t n = M.size();
    size_t m = B.empty() ? 0 : B[0].size();
    Real scale = 0;
    for (const auto& row : M)
        for (const auto& f : row) scale = std::max(scale, f.max_abs());
    Real thr = rel * std::max(scale, Real(1e-300));
    std::vector<Rational> c(n);
    for (size_t j = 0; j < n; ++j) {
        std::optional<Rational> lo;
        for (size_t i = 0; i < n; ++i)
            if (auto v = M[i][j].valuation(thr); v && (!lo || *v < *lo)) lo = v;
        if (!lo) return std::nullopt;
        c[j] = *lo;
    }
    Rational bLow;
    bool bAny = false;
    for (const auto& row : B)
        for (const auto& f : row)
            if (auto v = f.valuation(0); v && (!bAny || *v < bLow)) {
                bLow = *v;
                bAny = true;
            }
    if (!bAny) bLow = 0;
    long D = 1;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            D = std::lcm(D, M[i][j].den());
            if (!M[i][j].coeffs().empty()) D = std::lcm(D, Rational(M[i][j].lead() - c[j]).get_den().get_si());
        }
    for (const auto& row : B)
        for (const auto& f : row) {
            D = std::lcm(D, f.den());
            if (!f.coeffs().empty()) D = std::lcm(D, Rational(f.lead() - bLow).get_den().get_si());
        }
    // relative precision of M' and of B (in q-units above the shifts)
    std::optional<Rational> P;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (M[i][j].precision()) {
                Rational p = *M[i][j].precision() - c[j];
                if (!P || p < *P) P = p;
            }
    std::optional<Rational> PB;
    for (const auto& row : B)
        for (const auto& f : row)
            if (f.precision()) {
                Rational p = *f.precision() - bLow;
                if (!PB || p < *PB) PB = p;
            }
    // X' valid below min(P + bLow, precB) in absolute terms, i.e. K grid steps above bLow
    std::optional<Rational> Pabs;
    if (P) Pabs = *P + bLow;
    if (PB) Pabs = Pabs ? std::min(*Pabs, Rational(*PB + bLow)) : Rational(*PB + bLow);
    if (!Pabs) return std::nullopt;  // exact systems go through elimination
    Rational kk = (*Pabs - bLow) * D;
    mpz_class kc;
    mpz_cdiv_q(kc.get_mpz_t(), kk.get_num_mpz_t(), kk.get_den_mpz_t());
    long K = std::max<long>(0, kc.get_si());

    auto coef = [&](const QSeries& f, const Rational& shift, long k) { return f.coeff(shift + make_rational(k, D)); };
    std::vector<std::vector<CVec>> Mk;  // Mk[k][i][j]
    long maxk = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (!M[i][j].coeffs().empty()) {
                Rational top = (M[i][j].exponent(M[i][j].coeffs().size() - 1) - c[j]) * D;
                maxk = std::max(maxk, top.get_num().get_si() / top.get_den().get_si());
            }
    maxk = std::min(maxk, K);
    Mk.assign(maxk + 1, std::vector<CVec>(n, CVec(n, 0)));
    for (long k = 0; k <= maxk; ++k)
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) Mk[k][i][j] = coef(M[i][j], c[j], k);
    // leading matrix must be well conditioned
    std::vector<CVec> M0 = Mk[0];
    std::vector<CVec> M0inv;
    try {
        M0inv = cinverse(M0);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    Real n0 = 0, ni = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            n0 = std::max(n0, std::abs(M0[i][j]));
            ni = std::max(ni, std::abs(M0inv[i][j]));
        }
    if (!(n0 * ni < 1 / rel)) return std::nullopt;

    std::vector<std::vector<CVec>> X(K, std::vector<CVec>(n, CVec(m, 0)));
    for (long k = 0; k < K; ++k) {
        std::vector<CVec> R(n, CVec(m, 0));
        for (size_t i = 0; i < n; ++i)
            for (size_t t = 0; t < m; ++t) R[i][t] = coef(B[i][t], bLow, k);
        for (long j = 1; j <= std::min(k, maxk); ++j)
            for (size_t i = 0; i < n; ++i)
                for (size_t r = 0; r < n; ++r) {
                    Complex a = Mk[j][i][r];
                    if (a == Complex(0)) continue;
                    for (size_t t = 0; t < m; ++t) R[i][t] -= a * X[k - j][r][t];
                }
        for (size_t i = 0; i < n; ++i)
            for (size_t t = 0; t < m; ++t) {
                Complex v = 0;
                for (size_t r = 0; r < n; ++r) v += M0inv[i][r] * R[r][t];
                X[k][i][t] = v;
            }
    }
    QMatrixS out(n, std::vector<QSeries>(m));
    for (size_t j = 0; j < n; ++j)
        for (size_t t = 0; t < m; ++t) {
            std::vector<Complex> cs(K);
            for (long k = 0; k < K; ++k) cs[k] = X[k][j][t];
            out[j][t] = QSeries::from_grid(bLow - c[j], D, std::move(cs), *Pabs - c[j]);
        }
    return out;
}

// right null vector of a numerically singular matrix (complete pivoting), or nothing if well conditioned
std::optional<CVec> null_vector(std::vector<CVec> A, Real rel)
{
    size_t n = A.size();
    Real scale = 0;
    for (const auto& row : A)
        for (auto v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0) {
        CVec u(n, 0);
        if (n) u[0] = 1;
        return u;
    }
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    size_t rank = 0;
    for (; rank < n; ++rank) {
        size_t pi = rank, pj = rank;
        Real best = 0;
        for (size_t i = rank; i < n; ++i)
            for (size_t j = rank; j < n; ++j)
                if (std::abs(A[i][j]) > best) {
                    best = std::abs(A[i][j]);
                    pi = i;
                    pj = j;
                }
        if (best <= rel * scale) break;
        std::swap(A[rank], A[pi]);
        for (auto& row : A) std::swap(row[rank], row[pj]);
        std::swap(perm[rank], perm[pj]);
        for (size_t i = rank + 1; i < n; ++i) {
            Complex f = A[i][rank] / A[rank][rank];
            for (size_t j = rank; j < n; ++j) A[i][j] -= f * A[rank][j];
        }
    }
    if (rank == n) return std::nullopt;
    // free variable at position rank, back substitution for the pivots
    CVec y(n, 0);
    y[rank] = 1;
    for (size_t i = rank; i-- > 0;) {
        Complex acc = 0;
        for (size_t j = i + 1; j <= rank; ++j) acc += A[i][j] * y[j];
        y[i] = -acc / A[i][i];
    }
    CVec u(n, 0);
    for (size_t k = 0; k < n; ++k) u[perm[k]] = y[k];
    return u;
}

// f without its terms of exponent ≤ e
QSeries drop_through(const QSeries& f, const Rational& e)
{
    std::vector<std::pair<Rational, Complex>> t;
    for (size_t k = 0; k < f.coeffs().size(); ++k)
        if (f.exponent(k) > e) t.emplace_back(f.exponent(k), f.coeffs()[k]);
    return QSeries::from_terms(t, f.precision());
}

// Unimodular column operations M ↦ M·U until the lowest-order coefficient matrix of the columns is nonsingular.
// Each step cancels the leading term of one column against lower-valuation columns.
std::optional<std::pair<QMatrixS, QMatrixS>> reduce_columns(const QMatrixS& M, Real rel)
{
    size_t n = M.size();
    Real scale = 0;
    for (const auto& row : M)
        for (const auto& f : row) scale = std::max(scale, f.max_abs());
    Real thr = rel * std::max(scale, Real(1e-300));
    QMatrixS A = M;
    QMatrixS U(n, std::vector<QSeries>(n));
    for (size_t i = 0; i < n; ++i) U[i][i] = QSeries::constant(1);
    for (int step = 0; step < 64 * static_cast<int>(n); ++step) {
        std::vector<Rational> c(n);
        for (size_t j = 0; j < n; ++j) {
            std::optional<Rational> lo;
            for (size_t i = 0; i < n; ++i)
                if (auto v = A[i][j].valuation(thr); v && (!lo || *v < *lo)) lo = v;
            if (!lo) return std::nullopt;
            c[j] = *lo;
        }
        std::vector<CVec> L(n, CVec(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) L[i][j] = A[i][j].coeff(c[j]);
        auto u = null_vector(L, 1e-10);
        if (!u) return std::make_pair(std::move(A), std::move(U));
        Real umax = 0;
        for (auto v : *u) umax = std::max(umax, std::abs(v));
        size_t p = n;
        for (size_t j = 0; j < n; ++j)
            if (std::abs((*u)[j]) > 1e-8 * umax && (p == n || c[j] > c[p])) p = j;
        std::vector<QSeries> colA(n), colU(n);
        for (size_t i = 0; i < n; ++i) {
            colA[i] = QSeries::zero();
            colU[i] = QSeries::zero();
        }
        for (size_t j = 0; j < n; ++j) {
            if (std::abs((*u)[j]) <= 1e-8 * umax) continue;
            QSeries sh = QSeries::monomial((*u)[j] / (*u)[p], c[p] - c[j]);
            for (size_t i = 0; i < n; ++i) {
                colA[i] += sh * A[i][j];
                colU[i] += sh * U[i][j];
            }
        }
        // the leading terms cancel up to rounding
        for (size_t i = 0; i < n; ++i) {
            A[i][p] = drop_through(colA[i], c[p]);
            U[i][p] = colU[i];
        }
    }
    return std::nullopt;
}

}  // namespace

QMatrixS qsolve(const QMatrixS& M, const QMatrixS& B, Real rel)
{
    if (B.size() != M.size()) throw std::invalid_argument("qsolve: shape mismatch");
    if (auto X = qsolve_balanced(M, B, rel)) return *X;
    if (auto R = reduce_columns(M, rel))
        if (auto Y = qsolve_balanced(R->first, B, rel)) return qmatmul(R->second, *Y);
    return qsolve_elimination(M, B, rel);
}

std::vector<QSeries> qsolve(const QMatrixS& M, const std::vector<QSeries>& v, Real rel)
{
    QMatrixS B;
    for (const auto& f : v) B.push_back({f});
    auto X = qsolve(M, B, rel);
    std::vector<QSeries> out;
    for (auto& row : X) out.push_back(row[0]);
    return out;
}

QMatrixS qmatmul(const QMatrixS& A, const QMatrixS& B)
{
    size_t n = A.size(), k = B.size(), m = B.empty() ? 0 : B[0].size();
    QMatrixS C(n, std::vector<QSeries>(m));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j)
            for (size_t t = 0; t < k; ++t) C[i][j] += A[i][t] * B[t][j];
    return C;
}

QSeries qdet(QMatrixS A, Real rel)
{
    size_t n = A.size();
    Real scale = 0;
    for (const auto& row : A)
        for (const auto& f : row) scale = std::max(scale, f.max_abs());
    Real thr = rel * std::max(scale, Real(1e-300));
    QSeries det = QSeries::constant(1);
    for (size_t k = 0; k < n; ++k) {
        size_t piv = n;
        Rational best;
        for (size_t i = k; i < n; ++i) {
            auto v = A[i][k].valuation(thr);
            if (v && (piv == n || *v < best)) {
                piv = i;
                best = *v;
            }
        }
        if (piv == n) return QSeries::zero(det.precision());
        if (piv != k) {
            std::swap(A[k], A[piv]);
            det = -det;
        }
        det = det * A[k][k];
        QSeries inv = A[k][k].inverse(thr);
        for (size_t i = k + 1; i < n; ++i) {
            QSeries f = A[i][k] * inv;
            for (size_t j = k; j < n; ++j) A[i][j] -= f * A[k][j];
        }
    }
    return det;
}

int weight(const MultiIndex& b, const std::vector<int>& d)
{
    int s = 0;
    for (size_t i = 0; i < b.size(); ++i) s += b[i] * d[i];
    return s;
}

int total_degree(const MultiIndex& b) { return std::accumulate(b.begin(), b.end(), 0); }

Real factorial(const MultiIndex& b)
{
    Real f = 1;
    for (int x : b)
        for (int k = 2; k <= x; ++k) f *= k;
    return f;
}

std::vector<MultiIndex> multi_indices(const std::vector<int>& d, int maxWeight, bool exactWeight)
{
    std::vector<MultiIndex> out;
    MultiIndex b(d.size(), 0);
    auto rec = [&](auto&& self, size_t i, int w) -> void {
        if (i == d.size()) {
            if (!exactWeight || w == maxWeight) out.push_back(b);
            return;
        }
        for (b[i] = 0; w + b[i] * d[i] <= maxWeight; ++b[i]) self(self, i + 1, w + b[i] * d[i]);
        b[i] = 0;
    };
    rec(rec, 0, 0);
    std::sort(out.begin(), out.end(), [&](const MultiIndex& x, const MultiIndex& y) {
        int wx = weight(x, d), wy = weight(y, d);
        return wx != wy ? wx < wy : x > y;
    });
    return out;
}

QJet QJet::one(std::vector<int> weights, int maxWeight)
{
    QJet j(std::move(weights), maxWeight);
    j.set(MultiIndex(j.nvars(), 0), QSeries::constant(1));
    return j;
}

QJet QJet::variable(std::vector<int> weights, int maxWeight, int beta, Complex c)
{
    QJet j(std::move(weights), maxWeight);
    MultiIndex b(j.nvars(), 0);
    b.at(beta) = 1;
    j.set(b, QSeries::constant(c));
    return j;
}

QSeries QJet::coeff(const MultiIndex& b) const
{
    auto it = t_.find(b);
    return it == t_.end() ? QSeries() : it->second;
}

void QJet::set(const MultiIndex& b, QSeries f)
{
    if (weight(b, w_) > maxWeight_) return;
    t_[b] = std::move(f);
}

void QJet::add(const MultiIndex& b, const QSeries& f)
{
    if (weight(b, w_) > maxWeight_) return;
    auto it = t_.find(b);
    if (it == t_.end())
        t_.emplace(b, f);
    else
        it->second += f;
}

QJet QJet::piece(int j) const
{
    QJet p(w_, maxWeight_);
    for (const auto& [b, f] : t_)
        if (weight(b, w_) == j) p.t_.emplace(b, f);
    return p;
}

QJet QJet::truncated(int maxWeight) const
{
    QJet p(w_, std::min(maxWeight, maxWeight_));
    for (const auto& [b, f] : t_) p.set(b, f);
    return p;
}

QJet& QJet::operator+=(const QJet& o)
{
    if (w_.empty() && t_.empty()) {
        w_ = o.w_;
        maxWeight_ = o.maxWeight_;
    }
    maxWeight_ = std::min(maxWeight_, o.maxWeight_);
    for (auto it = t_.begin(); it != t_.end();)
        it = weight(it->first, w_) > maxWeight_ ? t_.erase(it) : std::next(it);
    for (const auto& [b, f] : o.t_) add(b, f);
    return *this;
}

QJet& QJet::operator-=(const QJet& o) { return *this += o * Complex(-1); }

QJet& QJet::operator*=(Complex s)
{
    for (auto& [b, f] : t_) f *= s;
    return *this;
}

QJet& QJet::operator*=(const QSeries& s)
{
    for (auto& [b, f] : t_) f = f * s;
    return *this;
}

Complex QJet::eval(Complex tau, const CVec& w) const
{
    Complex s = 0;
    for (const auto& [b, f] : t_) {
        Complex m = f.eval(tau);
        for (size_t i = 0; i < b.size(); ++i)
            for (int k = 0; k < b[i]; ++k) m *= w[i];
        s += m;
    }
    return s;
}

QJet jet_product(const QJet& a, const QJet& b)
{
    if (a.weights() != b.weights()) throw std::invalid_argument("jet_product: incompatible gradings");
    QJet r(a.weights(), std::min(a.max_weight(), b.max_weight()));
    const auto& d = a.weights();
    for (const auto& [ba, fa] : a.terms()) {
        int wa = weight(ba, d);
        if (wa > r.max_weight()) continue;
        for (const auto& [bb, fb] : b.terms()) {
            if (wa + weight(bb, d) > r.max_weight()) continue;
            MultiIndex s(ba.size());
            for (size_t i = 0; i < s.size(); ++i) s[i] = ba[i] + bb[i];
            r.add(s, fa * fb);
        }
    }
    return r;
}

Real distance(const QJet& a, const QJet& b)
{
    Real m = 0;
    for (const auto& [k, f] : a.terms()) m = std::max(m, distance(f, b.coeff(k)));
    for (const auto& [k, f] : b.terms())
        if (!a.terms().count(k)) m = std::max(m, f.max_abs());
    return m;
}

Real weighted_distance(const QJet& a, const QJet& b, Real rho)
{
    Real m = 0;
    for (const auto& [k, f] : a.terms()) m = std::max(m, weighted_distance(f, b.coeff(k), rho));
    for (const auto& [k, f] : b.terms())
        if (!a.terms().count(k)) m = std::max(m, weighted_norm(f, rho));
    return m;
}

Real weighted_norm(const QJet& a, Real rho)
{
    Real m = 0;
    for (const auto& [k, f] : a.terms()) m = std::max(m, weighted_norm(f, rho));
    return m;
}

void write_rows(std::ostream& os, const QJet& j)
{
    auto idx = [&](const MultiIndex& b) {
        std::string s;
        for (size_t i = 0; i < b.size(); ++i) s += (i ? " " : "") + std::to_string(b[i]);
        return s;
    };
    os << std::setprecision(std::numeric_limits<Real>::max_digits10);
    for (const auto& [b, f] : j.terms()) {
        if (f.precision()) os << "% " << idx(b) << " ; " << to_string(*f.precision()) << "\n";
        for (size_t k = 0; k < f.coeffs().size(); ++k)
            if (f.coeffs()[k] != Complex(0))
                os << idx(b) << " ; " << to_string(f.exponent(k)) << " ; " << f.coeffs()[k].real() << " ; "
                   << f.coeffs()[k].imag() << "\n";
    }
}

QJet read_rows(std::istream& is, std::vector<int> weights, int maxWeight)
{
    QJet j(weights, maxWeight);
    std::map<MultiIndex, std::vector<std::pair<Rational, Complex>>> terms;
    std::map<MultiIndex, Rational> precs;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string p;
        while (std::getline(ss, p, ';')) parts.push_back(p);
        return parts;
    };
    auto parse_idx = [&](const std::string& s) {
        std::istringstream ss(s);
        MultiIndex b;
        int x;
        while (ss >> x) b.push_back(x);
        if (b.size() != weights.size()) throw std::runtime_error("read_rows: bad multi-index '" + s + "'");
        return b;
    };
    auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
    };
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        if (line[0] == '%') {
            auto p = split(line.substr(1));
            if (p.size() != 2) throw std::runtime_error("read_rows: bad precision line '" + line + "'");
            precs[parse_idx(p[0])] = parse_rational(trim(p[1]));
            continue;
        }
        auto p = split(line);
        if (p.size() != 4) throw std::runtime_error("read_rows: bad row '" + line + "'");
        terms[parse_idx(p[0])].emplace_back(parse_rational(trim(p[1])),
                                            Complex(static_cast<Real>(std::stold(p[2])), static_cast<Real>(std::stold(p[3]))));
    }
    for (const auto& [b, pr] : precs) terms[b];
    for (const auto& [b, t] : terms) {
        std::optional<Rational> pr;
        if (auto it = precs.find(b); it != precs.end()) pr = it->second;
        j.set(b, QSeries::from_terms(t, pr));
    }
    return j;
}

}  // namespace ellfrob
