#pragma once

#include "ellfrob/linear_auto.hpp"
#include "ellfrob/matrix.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ellfrob {

struct CartanType {
    char letter = 'A';
    int rank = 1;
    std::string label() const { return std::string(1, letter) + std::to_string(rank); }
    friend bool operator==(const CartanType&, const CartanType&) = default;
};

// "G2", "d4", or a bare letter combined with an explicit rank
CartanType parse_type(const std::string& s, std::optional<int> rank = std::nullopt);
bool supported(const CartanType& t);

// The root α_fin + aShift·a + δShift·δ.
struct RootIndex {
    size_t finite = 0;
    long aShift = 0;
    long deltaShift = 0;
};

using IVec = std::vector<long>;

// Exact model of (F̃, Ĩ, R, a, δ, Λ0) for X_l^{(1,1)}.
struct MarkedEllipticRootSystem {
    CartanType type;
    int l = 0;
    int n = 0;  // l + 1
    QMatrix gramFin;  // I on the simple roots
    QMatrix gram;     // Ĩ on (α_1..α_l, a, δ, Λ0)
    std::vector<IVec> finiteRoots;  // simple-root coordinates, sorted
    IVec highestRoot;
    std::vector<int> marks;  // affine vertex 0 first
    Rational c0;             // least c with c·I even on the coroot lattice
    Rational c0RootLattice;  // same constant for the root lattice, reported only
    std::vector<int> degrees;  // filled by the coxeter module

    size_t dim() const { return static_cast<size_t>(l) + 3; }
    size_t ia() const { return static_cast<size_t>(l); }
    size_t idelta() const { return static_cast<size_t>(l) + 1; }
    size_t iLambda() const { return static_cast<size_t>(l) + 2; }

    RVec basis_vector(size_t i) const;
    RVec embed(const IVec& fin, long aShift = 0, long deltaShift = 0) const;
    RVec root(const RootIndex& r) const { return embed(finiteRoots.at(r.finite), r.aShift, r.deltaShift); }
    Rational form(const RVec& x, const RVec& y) const { return bilinear(gram, x, y); }
    // index of a finite root in finiteRoots, or -1
    long find_root(const IVec& fin) const;
    std::vector<size_t> positive_roots() const;
};

MarkedEllipticRootSystem build(const CartanType& t);
// system from an arbitrary finite Gram matrix on simple roots (used for negative controls)
MarkedEllipticRootSystem build_from_gram(const QMatrix& gramFin, const std::string& label);

// finite Gram matrix with long roots of squared length 2
QMatrix finite_gram(const CartanType& t);

LinearAuto reflection(const MarkedEllipticRootSystem& sys, const RVec& root);

struct AxiomReport {
    bool fullLattice = false;   // roots span a full lattice
    bool integrality = false;   // 2Ĩ(α,β)/Ĩ(α,α) ∈ ℤ
    bool reflectionClosed = false;  // R stable under its reflections
    bool irreducible = false;   // no orthogonal splitting
    bool radicalIsA = false;
    bool lambdaPairing = false;  // Ĩ(Λ0,δ)=1, Ĩ(Λ0,Λ0)=0
    Signature signature;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};
AxiomReport axioms_check(const MarkedEllipticRootSystem& sys);

// Does some α + m·a + k·δ (m, k ∈ ℤ) lie in span(L)? L must split rad I.
bool root_in_subspace(const MarkedEllipticRootSystem& sys, const std::vector<RVec>& L);

// rad-I coordinates (u, v) of x in F̃ = span(L) ⊕ ℝa ⊕ ℝδ, and the L-coordinates
struct Splitting {
    std::vector<RVec> L;
    QMatrix inv;  // inverse of [L | a | δ]
    RVec lcoords(const RVec& x) const;
    std::pair<Rational, Rational> rad(const RVec& x) const;
};
Splitting make_splitting(const MarkedEllipticRootSystem& sys, const std::vector<RVec>& L);

std::string serialize(const MarkedEllipticRootSystem& sys);
MarkedEllipticRootSystem deserialize(const std::string& text);

}  // namespace ellfrob
