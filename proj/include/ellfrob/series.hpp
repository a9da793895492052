#pragma once

#include "ellfrob/numeric.hpp"
#include "ellfrob/rational.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ellfrob {

// Truncated Fourier series Σ c_k q^{lead + k/den}, known for exponents < prec.
// An empty prec means the series is exact (a finite sum).
class QSeries {
public:
    QSeries() = default;

    static QSeries constant(Complex c);
    static QSeries monomial(Complex c, const Rational& e, std::optional<Rational> prec = {});
    static QSeries zero(std::optional<Rational> prec = {});
    // terms may repeat exponents; they are summed
    static QSeries from_terms(const std::vector<std::pair<Rational, Complex>>& terms, std::optional<Rational> prec);
    static QSeries from_grid(Rational lead, long den, std::vector<Complex> coeffs, std::optional<Rational> prec);

    const Rational& lead() const { return lead_; }
    long den() const { return den_; }
    const std::vector<Complex>& coeffs() const { return c_; }
    const std::optional<Rational>& precision() const { return prec_; }
    bool exact() const { return !prec_.has_value(); }

    Rational exponent(size_t k) const { return lead_ + make_rational(static_cast<long>(k), den_); }
    Complex coeff(const Rational& e) const;
    Real max_abs() const;

    // lowest exponent with |c| > threshold
    std::optional<Rational> valuation(Real threshold) const;
    // number of q-units between the lead and the precision (∞ → -1)
    long order() const;

    QSeries truncated(const Rational& prec) const;
    Complex eval(Complex tau) const;
    // q d/dq
    QSeries q_derivative() const;
    QSeries inverse(Real threshold) const;

    QSeries operator-() const;
    QSeries& operator+=(const QSeries& o);
    QSeries& operator-=(const QSeries& o);
    QSeries& operator*=(Complex s);

    friend QSeries operator+(QSeries a, const QSeries& b) { return a += b; }
    friend QSeries operator-(QSeries a, const QSeries& b) { return a -= b; }
    friend QSeries operator*(QSeries a, Complex s) { return a *= s; }
    friend QSeries operator*(Complex s, QSeries a) { return a *= s; }
    friend QSeries operator*(const QSeries& a, const QSeries& b);

    // max |a_e − b_e| over exponents below both precisions
    friend Real distance(const QSeries& a, const QSeries& b);

private:
    void regrid(const Rational& lead, long den);
    void clip();

    Rational lead_{0};
    long den_ = 1;
    std::vector<Complex> c_;
    std::optional<Rational> prec_;
};

std::string to_string(const QSeries& f, int maxTerms = 8);

// radius of the disc |q| ≤ ρ on which residuals are measured
inline constexpr Real kSampleRadius = 0.3;
// max_e |c_e|·ρ^e: the size of f on |q| = ρ, insensitive to roundoff in high-order coefficients
Real weighted_norm(const QSeries& f, Real rho = kSampleRadius);
Real weighted_distance(const QSeries& a, const QSeries& b, Real rho = kSampleRadius);

class NonUnitPivot : public std::runtime_error {
public:
    NonUnitPivot(const std::string& what, int column) : std::runtime_error(what), column(column) {}
    int column;
};

using QMatrixS = std::vector<std::vector<QSeries>>;

// Solves M·X = B by series Gaussian elimination; pivots by minimal valuation.
// Zero tests are relative: |c| ≤ rel·(largest coefficient in M).
QMatrixS qsolve(const QMatrixS& M, const QMatrixS& B, Real rel = 1e-9);
std::vector<QSeries> qsolve(const QMatrixS& M, const std::vector<QSeries>& v, Real rel = 1e-9);
QMatrixS qmatmul(const QMatrixS& A, const QMatrixS& B);
// determinant by elimination (no pivot test)
QSeries qdet(QMatrixS M, Real rel = 1e-9);

using MultiIndex = std::vector<int>;

int weight(const MultiIndex& b, const std::vector<int>& d);
int total_degree(const MultiIndex& b);
// b! = b_1!⋯b_n!
Real factorial(const MultiIndex& b);
// all b with d·b ≤ maxWeight (or == when exact is set)
std::vector<MultiIndex> multi_indices(const std::vector<int>& d, int maxWeight, bool exactWeight = false);

// Element of F(H)[z^1..z^n] truncated at weighted degree ≤ maxWeight.
class QJet {
public:
    QJet() = default;
    QJet(std::vector<int> weights, int maxWeight) : w_(std::move(weights)), maxWeight_(maxWeight) {}

    static QJet one(std::vector<int> weights, int maxWeight);
    static QJet variable(std::vector<int> weights, int maxWeight, int beta, Complex c = 1);

    const std::vector<int>& weights() const { return w_; }
    int max_weight() const { return maxWeight_; }
    size_t nvars() const { return w_.size(); }
    const std::map<MultiIndex, QSeries>& terms() const { return t_; }

    // exact zero when absent
    QSeries coeff(const MultiIndex& b) const;
    void set(const MultiIndex& b, QSeries f);
    void add(const MultiIndex& b, const QSeries& f);

    QJet piece(int j) const;
    QJet truncated(int maxWeight) const;

    QJet& operator+=(const QJet& o);
    QJet& operator-=(const QJet& o);
    QJet& operator*=(Complex s);
    QJet& operator*=(const QSeries& s);
    friend QJet operator+(QJet a, const QJet& b) { return a += b; }
    friend QJet operator-(QJet a, const QJet& b) { return a -= b; }
    friend QJet operator*(QJet a, Complex s) { return a *= s; }
    friend QJet operator*(QJet a, const QSeries& s) { return a *= s; }

    // evaluate at (τ, w) by summing the truncated polynomial
    Complex eval(Complex tau, const CVec& w) const;

private:
    std::vector<int> w_;
    int maxWeight_ = 0;
    std::map<MultiIndex, QSeries> t_;
};

QJet jet_product(const QJet& a, const QJet& b);
Real distance(const QJet& a, const QJet& b);
Real weighted_distance(const QJet& a, const QJet& b, Real rho = kSampleRadius);
Real weighted_norm(const QJet& a, Real rho = kSampleRadius);

// text rows "b_1 … b_n ; exponent ; re ; im", plus "% b_1 … b_n ; prec" lines for finite precision
void write_rows(std::ostream& os, const QJet& j);
QJet read_rows(std::istream& is, std::vector<int> weights, int maxWeight);

}  // namespace ellfrob
