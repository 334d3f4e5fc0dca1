#pragma once

#include <limits>
#include <string>

namespace massflow {

enum class Regime { subcritical, critical, supercritical };

struct ExponentData {
    double p = 0;
    int N = 1;
    double gamma_p = 0;   // N(1/2 - 1/p)
    double p_c = 0;       // 2 + 4/N
    double two_star = std::numeric_limits<double>::infinity();
    Regime regime = Regime::subcritical;
};

// pre: 2 < p < 2* (2* = inf for N <= 2). Throws otherwise.
ExponentData exponents(double p, int N);

std::string regime_name(Regime r);

} // namespace massflow
