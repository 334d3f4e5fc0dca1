#pragma once

// Adaptive Dormand-Prince 5(4) for the small ODE systems in this library
// (radial shooting, R^N soliton profiles). Header-only; the right-hand side
// is a callable f(r, y, dy) on a fixed-size state array.

#include <algorithm>
#include <array>
#include <cmath>

namespace massflow {

template <std::size_t D>
using OdeState = std::array<double, D>;

template <std::size_t D, class F>
class Rk45 {
  public:
    Rk45(F f, double rtol, double atol) : f_(std::move(f)), rtol_(rtol), atol_(atol) {}

    // One accepted adaptive step from (r, y); h is the trial step in/out.
    bool step(double& r, OdeState<D>& y, double& h, double hmax) {
        OdeState<D> k1, k2, k3, k4, k5, k6, k7, yt, y5;
        for (int attempt = 0; attempt < 80; ++attempt) {
            h = std::min(h, hmax);
            f_(r, y, k1);
            comb(yt, y, h, {1. / 5}, {&k1});
            f_(r + h / 5, yt, k2);
            comb(yt, y, h, {3. / 40, 9. / 40}, {&k1, &k2});
            f_(r + 3 * h / 10, yt, k3);
            comb(yt, y, h, {44. / 45, -56. / 15, 32. / 9}, {&k1, &k2, &k3});
            f_(r + 4 * h / 5, yt, k4);
            comb(yt, y, h, {19372. / 6561, -25360. / 2187, 64448. / 6561, -212. / 729}, {&k1, &k2, &k3, &k4});
            f_(r + 8 * h / 9, yt, k5);
            comb(yt, y, h, {9017. / 3168, -355. / 33, 46732. / 5247, 49. / 176, -5103. / 18656},
                 {&k1, &k2, &k3, &k4, &k5});
            f_(r + h, yt, k6);
            comb(y5, y, h, {35. / 384, 0.0, 500. / 1113, 125. / 192, -2187. / 6784, 11. / 84},
                 {&k1, &k2, &k3, &k4, &k5, &k6});
            f_(r + h, y5, k7);
            double err = 0;
            const double e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920, e5 = -17253. / 339200,
                         e6 = 22. / 525, e7 = -1. / 40;
            for (std::size_t i = 0; i < D; ++i) {
                double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y5[i]));
                err = std::max(err, std::abs(ei) / sc);
            }
            if (err <= 1.0 || h <= 1e-14 * (std::abs(r) + 1)) {
                r += h;
                y = y5;
                double fac = (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
                h *= std::clamp(fac, 0.2, 5.0);
                return true;
            }
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        }
        return false;
    }

  private:
    static void comb(OdeState<D>& out, const OdeState<D>& y, double h, std::initializer_list<double> c,
                     std::initializer_list<const OdeState<D>*> ks) {
        out = y;
        auto ci = c.begin();
        for (auto k : ks) {
            for (std::size_t i = 0; i < D; ++i) out[i] += h * (*ci) * (*k)[i];
            ++ci;
        }
    }
    F f_;
    double rtol_, atol_;
};

} // namespace massflow
