#pragma once

#include "ellfrob/invariants.hpp"

#include <string>
#include <vector>

namespace ellfrob {

// Polynomial in x^1..x^n with q-series coefficients. Indices 0..n below refer to x^0 = τ, x^1..x^n.
using XPoly = std::map<MultiIndex, QSeries>;

int degree_of(const Setting& s, int alpha);  // d_0 = 0

// jet of ∂x^α/∂z^γ, α, γ ∈ 0..n
QJet dx_jet(const Setting& s, const BasicInvariantSet& xs, int alpha, int gamma);
// jet of Ĩ(dx^α, dx^β) = Σ ∂x^α/∂z^{γ1} ∂x^β/∂z^{γ2} Ĩ(z^{γ1}, z^{γ2}), valid to weight jetWeight − d_n
QJet intersection_jet(const Setting& s, const BasicInvariantSet& xs, int alpha, int beta);
// pointwise Ĩ(dx^α, dx^β) from the differentials of the exponential sums
Complex intersection_at(const Setting& s, const BasicInvariantSet& xs, const PointEval& pe, int alpha, int beta);

struct InvariantExpansion {
    int degree = 0;
    XPoly coeffs;
    Real residual = 0;  // weighted residual of the rows not used in the solve, relative to the jet
};

// expansion of a degree-m function, given by its jet, in monomials x^b with d·b = m
InvariantExpansion expand(const Setting& s, const BasicInvariantSet& xs, const QJet& f, int m);
// closed form: δ_{α+β,n}·d_n/(−2π√−1) on x^n plus (1/b!)∂^b(∂x^α/∂z^{β*} + ∂x^β/∂z^{α*})|_{L^⊥} on x^b, b_n = 0
InvariantExpansion intersection_taylor_formula(const Setting& s, const BasicInvariantSet& xs, int alpha, int beta);

// max over monomials of the weighted coefficient difference, relative to the larger expansion
Real expansion_distance(const XPoly& a, const XPoly& b);
// absolute: max over monomials of the weighted coefficient difference
Real expansion_difference(const XPoly& a, const XPoly& b);
Real xpoly_norm(const XPoly& p);

XPoly xpoly_scale(XPoly p, Complex c);
XPoly xpoly_add(XPoly a, const XPoly& b);
XPoly xpoly_mul(const XPoly& a, const XPoly& b);
// ∂/∂x^ρ; ρ = 0 acts on the coefficients as 2π√−1·q d/dq
XPoly xpoly_derivative(const XPoly& p, int rho);
Complex xpoly_eval(const XPoly& p, Complex tau, const CVec& x);
// value of a polynomial in x at a point of Y
Complex xpoly_eval_at(const Setting& s, const BasicInvariantSet& xs, const XPoly& p, const PointEval& pe);

struct FrobeniusTable {
    std::vector<int> degrees;  // d_0 = 0, d_1..d_n
    int n = 0;
    int dn = 1;
    Complex c;  // intersection scaling
    std::vector<std::vector<Complex>> gUpper;  // g^{αβ}
    std::vector<std::vector<Complex>> gLower;  // g_{αβ}
    Real metricNonConstancy = 0;
    std::vector<std::vector<XPoly>> cI;  // expansion of cĨ(dx^α, dx^β)
    std::vector<std::vector<Real>> expandResidual;
    // C[α][β][γ]
    std::vector<std::vector<std::vector<XPoly>>> C;
    int unitIndex = 0;
    Complex unitScale{1};  // e = unitScale·∂/∂x^n
};

FrobeniusTable metric_and_constants(const Setting& s, const BasicInvariantSet& xs, Complex c);
inline Complex default_scaling(const Setting& s) { return -kTwoPiI / Real(s.dn()); }
// (C/2, 2e, g/2): the scaled structure for the same intersection form
FrobeniusTable rescaled(const FrobeniusTable& t, Complex factor);

struct XPoint {
    Complex tau;
    CVec x;  // x^1..x^n
};
std::vector<XPoint> chart_samples(const Setting& s, int count, std::uint64_t seed);

struct FrobeniusReport {
    Real metricAntiDiagonal = 0;  // |g_{αβ} − δ_{α+β,n}|
    Real metricConstant = 0;
    Real unitRow = 0;          // C_{n,β}^γ = δ_{β,γ}
    Real unitColumn = 0;       // C_{α,n}^γ = δ_{α,γ} from the general formula
    Real commutativity = 0;
    Real associativity = 0;
    Real invariance = 0;       // total symmetry of c_{αβγ}
    Real potentiality = 0;
    Real eulerDegree = 0;      // weighted norm of coefficients on monomials of the wrong degree
    Real intersection = 0;     // g(E_norm, g*(ω)∘g*(ω')) − cĨ(ω, ω')
    Real metricFromLie = 0;    // Lie_e(cĨ) − g
    Real unitCharacterization = 0;  // (∂/∂x^n)² Ĩ(dx^n, dx^n)
    Real worst() const;
    std::vector<std::pair<std::string, Real>> items() const;
};

FrobeniusReport verify_frobenius(const Setting& s, const FrobeniusTable& t, const std::vector<XPoint>& pts);

struct FlatnessReport {
    Real vMembership = 0;       // (∂/∂x^n)² of every Ĩ(dx^α, dx^β)
    Real unitCondition = 0;     // (∂/∂x^n)² Ĩ(dx^n, dx^n)
    Real restriction = 0;       // Ĩ(dx^n, dx^n)|_{L^⊥}
    Real constantRestriction = 0;  // q-derivative of x^n|_{L^⊥}
    bool holds[4] = {false, false, false, false};
    bool agree() const { return holds[0] == holds[1] && holds[1] == holds[2] && holds[2] == holds[3]; }
    Real isometry = -1;  // Gram of ψ(x^α) against g_{αβ}; −1 when not checked
};

FlatnessReport flatness_equivalences(const Setting& s, const BasicInvariantSet& xs, const FrobeniusTable* table = nullptr);

// x^n ↦ (1 + q)·x^n
BasicInvariantSet perturb_top(const BasicInvariantSet& xs);

}  // namespace ellfrob
