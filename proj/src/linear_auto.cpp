#include "ellfrob/linear_auto.hpp"

namespace ellfrob {

LinearAuto::LinearAuto(QMatrix m, const QMatrix& gram, int l) : m_(std::move(m))
{
    size_t dim = static_cast<size_t>(l) + 3;
    if (m_.rows() != dim || m_.cols() != dim || gram.rows() != dim)
        throw std::invalid_argument("LinearAuto: dimension mismatch");
    preserves_form_ = m_.transpose() * gram * m_ == gram;
    // F = span(α_i, a, δ): the Λ0 row of every F-column vanishes
    maps_F_ = true;
    for (size_t j = 0; j + 1 < dim; ++j)
        if (sgn(m_(dim - 1, j)) != 0) maps_F_ = false;
    // rad I = span(a, δ) fixed pointwise
    fixes_rad_ = true;
    for (size_t j : {dim - 3, dim - 2})
        for (size_t i = 0; i < dim; ++i)
            if (m_(i, j) != (i == j ? 1 : 0)) fixes_rad_ = false;
}

}  // namespace ellfrob
