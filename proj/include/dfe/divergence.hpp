#pragma once

#include <cmath>
#include <stdexcept>

#include "dfe/generator.hpp"
#include "dfe/histogram.hpp"

namespace dfe {

/// Single-bin contribution psi(p, q) = q f(p/q) with the boundary
/// conventions psi(p, 0) = p f*(0), psi(0, q) = q f(0), psi(0, 0) = 0.
/// May return +inf when the required limit is infinite.
inline double psi(double p, double q, const DivergenceGenerator& f) {
    if (std::isnan(p) || std::isnan(q)) throw std::invalid_argument("psi: NaN input");
    if (p < 0.0 || q < 0.0) throw std::invalid_argument("psi: negative input");
    if (p == 0.0 && q == 0.0) return 0.0;
    if (q == 0.0) return p * f.fstar_at_zero;
    if (p == 0.0) return q * f.f_at_zero;
    return q * f.eval(p / q);
}

/// D_f(P || Q) = sum_l psi(P_l, Q_l, f). Extended-real: +inf is a valid
/// result (e.g. KL without absolute continuity).
inline double f_divergence(const Histogram& P, const Histogram& Q,
                           const DivergenceGenerator& f) {
    if (P.bins() != Q.bins()) throw std::invalid_argument("f_divergence: bin counts differ");
    double sum = 0.0;
    for (std::size_t l = 0; l < P.bins(); ++l) {
        const double term = psi(P[l], Q[l], f);
        if (std::isinf(term)) return kInf;
        sum += term;
    }
    // convexity gives nonnegativity; clip roundoff from below
    return sum < 0.0 ? 0.0 : sum;
}

}  // namespace dfe
