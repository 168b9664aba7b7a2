#pragma once

#include "xs/real.hpp"

namespace xs {

struct AiryValue {
    Real ai, aip;
};

// Ai and Ai' from the Maclaurin series, with the working precision raised by
// about (4/3)|x|^{3/2}/ln 10 digits to cover the cancellation.
AiryValue airy(const Real& x, const PrecisionContext& ctx);

// Airy kernel (Ai(x)Ai'(y) - Ai'(x)Ai(y))/(x - y); diagonal Ai'(x)^2 - x Ai(x)^2.
Real airy_kernel(const Real& x, const Real& y, const PrecisionContext& ctx);

}  // namespace xs
