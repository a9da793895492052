#pragma once

#include "ellfrob/frobenius.hpp"

#include <string>
#include <vector>

namespace ellfrob {

struct CheckResult {
    std::string name;
    Real value = 0;  // residual, or 0/1 for exact checks (0 = pass)
    Real tol = 0;
    bool pass = false;
    std::string detail;
};

struct SuiteReport {
    std::vector<CheckResult> checks;
    bool ok() const;
    void add(std::string name, Real value, Real tol, std::string detail = {});
    void exact(std::string name, bool pass, std::string detail = {});
};

struct SuiteOptions {
    SettingOptions setting;
    bool stability = true;  // rerun at q-order + 5
    int samples = 5;
};

// Everything one setting supports: exact structure, invariants, and for codimension 1 the Frobenius structure.
SuiteReport verify_suite(const CartanType& type, const SuiteOptions& opt);

// Coefficient drift between two settings of the same type at different q-orders.
struct StabilityReport {
    Real goodJets = 0;
    Real restriction = 0;
    Real structureConstants = 0;
    Real metric = 0;
    Real worst() const { return std::max({goodJets, restriction, structureConstants, metric}); }
};
StabilityReport compare_truncations(const Setting& a, const BasicInvariantSet& xa, const FrobeniusTable* ta,
                                    const Setting& b, const BasicInvariantSet& xb, const FrobeniusTable* tb);

}  // namespace ellfrob
