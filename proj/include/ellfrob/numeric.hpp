#pragma once

#include "ellfrob/cyclotomic.hpp"
#include "ellfrob/rational.hpp"

#include <complex>
#include <limits>
#include <numbers>
#include <vector>

namespace ellfrob {

#ifdef ELLFROB_LONG_DOUBLE
using Real = long double;
#else
using Real = double;
#endif
using Complex = std::complex<Real>;
using CVec = std::vector<Complex>;

inline constexpr Real kPi = std::numbers::pi_v<Real>;
// 2π√−1
inline const Complex kTwoPiI{0, 2 * kPi};

constexpr int mantissa_bits() { return std::numeric_limits<Real>::digits; }

Real to_real(const Rational& q);
Complex to_complex(const Cyclotomic& x);
CVec to_complex(const RVec& v);
CVec to_complex(const std::vector<Cyclotomic>& v);

// e^{2πi·x}
Complex unit_phase(const Rational& x);

// dense complex linear algebra, partial pivoting
std::vector<CVec> cinverse(const std::vector<CVec>& m);
CVec csolve(std::vector<CVec> m, CVec b);

}  // namespace ellfrob
