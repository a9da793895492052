#pragma once

#include "ellfrob/matrix.hpp"

namespace ellfrob {

// Automorphism of F̃ in the basis (α_1..α_l, a, δ, Λ0), acting on columns.
// Membership in O(F̃, F, rad I) is checked once at construction.
class LinearAuto {
public:
    LinearAuto() = default;
    // gram is Ĩ in the same basis, l the finite rank
    LinearAuto(QMatrix m, const QMatrix& gram, int l);

    const QMatrix& matrix() const { return m_; }
    bool preserves_form() const { return preserves_form_; }
    bool maps_F_into_F() const { return maps_F_; }
    bool fixes_rad() const { return fixes_rad_; }
    bool in_group() const { return preserves_form_ && maps_F_ && fixes_rad_; }

    RVec operator()(const RVec& v) const { return m_ * v; }

    friend bool operator==(const LinearAuto& a, const LinearAuto& b) { return a.m_ == b.m_; }

private:
    QMatrix m_;
    bool preserves_form_ = false, maps_F_ = false, fixes_rad_ = false;
};

}  // namespace ellfrob
