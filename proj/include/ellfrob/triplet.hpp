#pragma once

#include "ellfrob/coxeter.hpp"
#include "ellfrob/numeric.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ellfrob {

// A point z ∈ 𝔼^c ∩ 𝔼_τ, given by ⟨e_j, z⟩ = −2π√−1(u_j + τ·v_j) on a complement {e_j} of rad I in F^{=1}.
struct RegularPoint {
    std::vector<RVec> complement;
    RVec u, v;
    std::uint64_t seed = 0;
    int attempts = 0;

    // (p, q) with ⟨x, z⟩ = −2π√−1(p + q·τ)
    std::pair<Rational, Rational> pairing(const MarkedEllipticRootSystem& sys, const CoxeterData& data,
                                          const RVec& x) const;
    Complex value(const MarkedEllipticRootSystem& sys, const CoxeterData& data, const RVec& x, Complex tau) const;
};

// exact non-vanishing for all translates; throws after maxAttempts
RegularPoint regular_point(const MarkedEllipticRootSystem& sys, const CoxeterData& data, std::uint64_t seed,
                           int maxAttempts = 64);
bool is_regular(const MarkedEllipticRootSystem& sys, const CoxeterData& data, const RegularPoint& z);

enum class SignatureType { Positive, Zero, Negative, Other };
std::string to_string(SignatureType t);

struct AdmissibilityReport {
    bool splitting = false;   // F̃ = L ⊕ rad I
    bool rootFree = false;    // L ∩ R = ∅
    bool zetaPrimitive = false;
    bool gStable = false;     // g(L) ⊂ L
    bool eigenvalues = false; // semisimple with eigenvalues ζ^{d_α}
    bool ok() const { return splitting && rootFree && zetaPrimitive && gStable && eigenvalues; }
    std::string failures() const;
};

struct AdmissibleTriplet {
    LinearAuto g;
    int dn = 1;
    int zetaExponent = 0;
    std::vector<int> degrees;
    Rational r;
    std::vector<RVec> L;   // F^{≠1} basis, then L_0 basis, then λ_r
    size_t nFne1 = 0, nL0 = 0;
    RVec lambdaR;
    Splitting split;
    // eigenvectors over Q(ζ_dn): g z^α = ζ^{d_α} z^α (exact, before normalization)
    std::vector<std::vector<Cyclotomic>> zExact;
    // working basis in F̃ coordinates (normalized when dualNormalized)
    std::vector<CVec> z;
    Signature signature;
    SignatureType sigType = SignatureType::Other;
    bool dualNormalized = false;
    AdmissibilityReport admissibility;

    // coordinates: ν = Σ c_β z^β + c_a a + c_δ δ
    std::vector<CVec> zCoordMap;  // n × dim complex matrix: c_β(ν) = Σ_i zCoordMap[β][i] ν_i

    int n() const { return static_cast<int>(degrees.size()); }
    CVec zcoords(const RVec& nu) const;
    // exact rad-I part (c_a, c_δ)
    std::pair<Rational, Rational> rad(const RVec& nu) const { return split.rad(nu); }
    Cyclotomic zeta_power(long k) const { return Cyclotomic::zeta_power(dn, k * zetaExponent); }
};

AdmissibleTriplet build_L(const MarkedEllipticRootSystem& sys, const CoxeterData& data, const RegularPoint& z,
                          const Rational& r);
AdmissibilityReport check_admissible(const MarkedEllipticRootSystem& sys, const AdmissibleTriplet& t);

// z^1..z^{n−1} ∈ L∩F dual across d_α + d_{n−α} = d_n, z^n = −2π√−1·λ_0
AdmissibleTriplet dual_normalize(const MarkedEllipticRootSystem& sys, const CoxeterData& data, AdmissibleTriplet t);

// Ĩ(z^α, z^β) for α, β ∈ 0..n with z^0 = δ/(−2π√−1)
std::vector<CVec> z_gram(const MarkedEllipticRootSystem& sys, const AdmissibleTriplet& t);

// Point x ∈ Y as the values ⟨e_i, x⟩ on the standard basis of F̃.
struct YPoint {
    CVec values;
    Complex pair(const RVec& mu) const;
    Complex pair(const CVec& mu) const;
};

// x with ⟨a,x⟩ = −2π√−1, ⟨δ,x⟩ = −2π√−1·τ, ⟨z^β, x⟩ = w_β
YPoint point_from_coords(const MarkedEllipticRootSystem& sys, const AdmissibleTriplet& t, Complex tau,
                         const CVec& w);
// action of an automorphism: ⟨μ, g·x⟩ = ⟨g^{-1}μ, x⟩
YPoint act(const QMatrix& g, const YPoint& x);

struct LperpChart {
    const AdmissibleTriplet* triplet = nullptr;
    const MarkedEllipticRootSystem* sys = nullptr;
    YPoint point(Complex tau) const;
    // g x_τ = x_τ holds exactly: g^{-1} preserves the rad coordinates of every basis vector
    bool g_fixes_exactly() const;
    bool regular_at(Complex tau, Real tol = 1e-12) const;
};

LperpChart lperp_chart(const MarkedEllipticRootSystem& sys, const AdmissibleTriplet& t);

}  // namespace ellfrob
