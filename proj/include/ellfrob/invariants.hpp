#pragma once

#include "ellfrob/coxeter.hpp"
#include "ellfrob/series.hpp"
#include "ellfrob/triplet.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace ellfrob {

// Root system, Coxeter data and admissible triplet that everything below is expanded against.
struct Setting {
    MarkedEllipticRootSystem sys;
    CoxeterData data;
    AdmissibleTriplet triplet;
    int qOrder = 20;
    int jetWeight = 0;  // weighted degree of stored jets
    Real tol = 1e-8;
    std::uint64_t seed = 1;

    int n() const { return sys.n; }
    const std::vector<int>& degrees() const { return data.degrees; }
    int dn() const { return data.dn; }
};

struct SettingOptions {
    Rational r{0};
    int qOrder = 20;
    int jetWeight = 0;  // 0: 3·d_n, enough for the intersection form up to degree 2·d_n
    Real tol = 1e-8;
    std::uint64_t seed = 1;
    bool dualNormalize = true;  // ignored unless codim 1 and r = 0
};

Setting make_setting(const CartanType& type, const SettingOptions& opt = {});

// e^{μ} with μ = Σ c_β z^β + c_a a + c_δ δ in the splitting F̃ = L ⊕ rad Ĩ:
// pL = −c_δ, zc = (c_β), lamp = amp·e^{−2π√−1 c_a}.
struct ThetaTerm {
    RVec mu;
    Complex amp{1};
    Rational pL;
    Complex lamp{1};
    CVec zc;
};

class ThetaInvariant {
public:
    int degree = 0;
    std::vector<ThetaTerm> terms;
    Rational complete;  // every term with pL < complete is present
    Rational lowest;

    Complex eval(const YPoint& x) const;
    // value and differential (as an element of F̃ ⊗ ℂ)
    std::pair<Complex, CVec> eval_grad(const YPoint& x) const;
    size_t size() const { return terms.size(); }
};

// L-data of μ under the setting's splitting
ThetaTerm make_term(const Setting& s, RVec mu, Complex amp = 1);

// fundamental weights in simple-root coordinates
std::vector<RVec> fundamental_weights(const MarkedEllipticRootSystem& sys);
// dominant λ = Σ n_i ω_i with Σ n_i m_i ≤ level (m_i the marks), as coefficient vectors n
std::vector<std::vector<int>> alcove_weights(const MarkedEllipticRootSystem& sys, int level);
// #alcove weights of level m; throws if it differs from #{b : d·b = m}
int span_dimension(const MarkedEllipticRootSystem& sys, const std::vector<int>& degrees, int m);
int monomial_count(const std::vector<int>& degrees, int m);

class OrbitTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// W-orbit sum of λ + m·Λ0, complete below pL = lowest + qOrder
ThetaInvariant orbit_theta(const Setting& s, const std::vector<int>& lambda, int level, int qOrder,
                           size_t maxTerms = 2000000);

// Taylor jet at L^⊥ up to weighted degree maxWeight
QJet taylor_jet(const Setting& s, const ThetaInvariant& f, int maxWeight);

// polynomial in the orbit-sum generators with q-series coefficients
using InvPoly = std::map<MultiIndex, QSeries>;

struct BasicInvariantSet {
    std::vector<int> degrees;
    std::vector<ThetaInvariant> raw;               // orbit sums y^1..y^n
    std::vector<std::vector<int>> rawWeights;      // λ of each orbit sum
    std::vector<QJet> rawJets;
    std::vector<InvPoly> x;                        // x^α as polynomials in y
    std::vector<QJet> jets;                        // jets of x^α
    bool good = false;
    bool compatible = false;
    // jets of monomials in y, keyed by (exponent, weight)
    std::shared_ptr<std::map<std::pair<MultiIndex, int>, QJet>> rawCache =
        std::make_shared<std::map<std::pair<MultiIndex, int>, QJet>>();

    size_t n() const { return degrees.size(); }
};

BasicInvariantSet select_basic(const Setting& s);

// jet of a polynomial in the generators y
QJet poly_jet(const BasicInvariantSet& xs, const InvPoly& p, int maxWeight);
// jet of the monomial x^a in the current generators x
QJet monomial_jet(const BasicInvariantSet& xs, const MultiIndex& a, int maxWeight);
// generator values and differentials at one point of Y
struct PointEval {
    Complex tau;
    std::vector<Complex> y;
    std::vector<CVec> dy;
};
PointEval evaluate_generators(const Setting& s, const BasicInvariantSet& xs, const YPoint& x);
// value and differential of a polynomial in y
std::pair<Complex, CVec> eval_poly(const Setting& s, const PointEval& pe, const InvPoly& p);
InvPoly poly_mul(const InvPoly& a, const InvPoly& b);
// substitute x^α = xs.x[α] into a polynomial in x
InvPoly compose(const BasicInvariantSet& xs, const InvPoly& inX);

// Jacobian (∂x^α/∂z^β)|_{L^⊥}, α, β = 1..n
QMatrixS jacobian(const BasicInvariantSet& xs);

// φ(x^a): Taylor jet of Π (x^α − x^α|_{L^⊥})^{a_α}
QJet phi(const BasicInvariantSet& xs, const MultiIndex& a, int maxWeight);
// ψ(x^a): the weighted-degree d·a part of φ(x^a)
QJet psi(const BasicInvariantSet& xs, const MultiIndex& a);
struct PsiMatrix {
    std::vector<MultiIndex> rows;  // z^b
    std::vector<MultiIndex> cols;  // x^a
    QMatrixS M;
};
PsiMatrix psi_matrix(const BasicInvariantSet& xs, int m);

struct GoodReport {
    Real goodness = 0;       // matching-degree Taylor coefficients with |a| ≥ 2
    Real compatibility = 0;  // Jacobian minus identity
    Real deltaProperty = 0;  // (1/b!)∂^b[x − x|]^a/∂z^b|_{L^⊥} − δ_{a,b}
    Real z0Property = 0;     // ∂_{z^0} of the degree-matching Taylor coefficients
    Real psiIdentity = 0;    // ψ(x^α) − z^α
    bool ok(Real tol) const;
};

BasicInvariantSet make_good(const Setting& s, const BasicInvariantSet& xs);
GoodReport check_good(const Setting& s, const BasicInvariantSet& xs);

// sample points of Y: |q| ≤ 0.05, |w_β| ≤ 0.2, deterministic in seed
std::vector<YPoint> sample_points(const Setting& s, int count, std::uint64_t seed);

struct InvarianceReport {
    Real worstReflection = 0;  // max over generators and samples, relative to Σ|terms|
    Real worstUnip = 0;        // f(unip^{-1}x) − ζ^{-m} f(x)
};
InvarianceReport invariance_check(const Setting& s, const ThetaInvariant& f, const std::vector<YPoint>& pts);

// generators of the elliptic Weyl group used for the checks: reflections in α_1..α_l, −θ + δ, α_i + a
std::vector<QMatrix> weyl_generators(const MarkedEllipticRootSystem& sys);

// ∂f/∂z^n − (m/−2π√−1)·f on the jet of a degree-m function
Real euler_jet_residual(const Setting& s, const QJet& j, int m);

// ∂/∂z^β on jets (β = 0: 2π√−1·q d/dq); the result loses weight d_β of validity
QJet jet_derivative(const Setting& s, const QJet& j, int beta);

// Exchange file: a header with the setting, then one block of jet rows per invariant.
struct ExchangeHeader {
    std::string type;
    int l = 0;
    std::vector<int> degrees;
    Rational r{0};
    std::uint64_t seed = 1;
    int qOrder = 20;
    int jetWeight = 0;
    int dn = 1;
    int zetaExponent = 0;
    std::string signature;
    bool dualNormalized = false;
    bool good = false;
};
struct ExchangeBlock {
    int degree = 0;
    QJet jet;
};
struct ExchangeFile {
    ExchangeHeader header;
    std::vector<ExchangeBlock> blocks;
};

ExchangeHeader exchange_header(const Setting& s, bool good);
void write_exchange(std::ostream& os, const ExchangeHeader& h, const std::vector<ExchangeBlock>& blocks);
ExchangeFile read_exchange(std::istream& is);

}  // namespace ellfrob
