#include "massflow/exponents.hpp"

#include <cmath>
#include <stdexcept>

namespace massflow {

ExponentData exponents(double p, int N) {
    if (N < 1 || N > 3) throw std::invalid_argument("exponents: N must be 1, 2 or 3");
    ExponentData e;
    e.p = p;
    e.N = N;
    e.two_star = (N <= 2) ? std::numeric_limits<double>::infinity() : 2.0 * N / (N - 2);
    if (!(p > 2.0) || !(p < e.two_star))
        throw std::invalid_argument("exponents: require 2 < p < 2*");
    e.gamma_p = N * (0.5 - 1.0 / p);
    e.p_c = 2.0 + 4.0 / N;
    const double pg = p * e.gamma_p;
    if (pg < 2.0) e.regime = Regime::subcritical;
    else if (pg == 2.0 || p == e.p_c) e.regime = Regime::critical;
    else e.regime = Regime::supercritical;
    return e;
}

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::subcritical: return "subcritical";
        case Regime::critical: return "critical";
        default: return "supercritical";
    }
}

} // namespace massflow
