#pragma once

#include "ellfrob/rootsys.hpp"

#include <string>
#include <vector>

namespace ellfrob {

// Vertex of the elliptic Dynkin diagram: affine vertices "0".."l", a-translates "i*".
struct DiagramVertex {
    std::string name;
    RVec vec;
    int mark = 1;
};

std::vector<DiagramVertex> elliptic_diagram(const MarkedEllipticRootSystem& sys);

struct CoxeterData {
    LinearAuto c;  // c̃
    std::vector<std::string> ordering;  // reflection word, leftmost factor first
    int dn = 1;
    std::vector<int> degrees;  // ascending, size n
    int zetaExponent = 0;      // ζ = exp(2πi·zetaExponent/dn)
    LinearAuto ss, unip;
    std::vector<RVec> Fne1, Feq1;
    RVec lambda;
    int codim = 0;
    Rational unipShift;  // unip(Λ0) = Λ0 + s·a
    Rational kzShift;    // c̃^{dn}(Λ0) = Λ0 + kzShift·a
    QMatrix cF;          // restriction of c̃ to F = span(α_i, a, δ)
};

// product of reflections in the given vertex order (no checks)
LinearAuto coxeter_product(const MarkedEllipticRootSystem& sys, const std::vector<DiagramVertex>& word);

// orders of c|_F: least k ≤ limit with c^k = id, or 0
int order_on_F(const QMatrix& cF, int limit);

struct EigenStructureReport {
    bool semisimpleOfOrder = false;
    std::vector<int> eigenMultiplicity;  // index k: multiplicity of exp(2πik/dn) on F
    std::vector<int> degrees;
    bool ok() const { return semisimpleOfOrder; }
};

EigenStructureReport eigen_structure_check(const MarkedEllipticRootSystem& sys, const QMatrix& cF, int dn);
bool root_avoidance_check(const MarkedEllipticRootSystem& sys, const CoxeterData& data);
bool lambda_shift_check(const MarkedEllipticRootSystem& sys, const CoxeterData& data);

// Jordan decomposition c̃ = ss·unip; fills lambda, ss, unip, unipShift, zetaExponent
void jordan(const MarkedEllipticRootSystem& sys, CoxeterData& data);

// builds c̃ from the default ordering, searching permutations if a check fails
CoxeterData hyperbolic_coxeter(const MarkedEllipticRootSystem& sys);
// builds from an explicit ordering of vertex names; throws if the word is not hyperbolic Coxeter
CoxeterData coxeter_from_ordering(const MarkedEllipticRootSystem& sys, const std::vector<std::string>& names,
                                  bool requireChecks = true);

int fixed_locus_dim(const CoxeterData& data);

MarkedEllipticRootSystem with_degrees(MarkedEllipticRootSystem sys, const CoxeterData& data);

}  // namespace ellfrob
