#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>

#include "netcontract/error.hpp"
#include "netcontract/matrix_core.hpp"

namespace netcontract::ode {

/// One classical Runge-Kutta step of size h for x' = f(t, x).
template <class Rhs>
Vector rk4_step(Rhs&& f, double t, const Vector& x, double h) {
    const Vector k1 = f(t, x);
    const Vector k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
    const Vector k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
    const Vector k4 = f(t + h, x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Fixed-step RK4 from t0 to t_end. The observer sees (t, x) at t0 and after
/// every step; times are t0 + k h, with a shorter final step if t_end is not
/// on the grid. Throws Error(Diverged) on a non-finite state.
template <class Rhs, class Observer>
void rk4_integrate(Rhs&& f, Vector x, double t0, double t_end, double h, Observer&& observe) {
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "rk4_integrate: step must be positive");
    if (!(t_end >= t0)) throw Error(ErrorKind::InvalidArgument, "rk4_integrate: t_end before t0");
    const double span = t_end - t0;
    auto steps = static_cast<std::size_t>(std::floor(span / h + 1e-9));
    const bool partial = span - static_cast<double>(steps) * h > 1e-9 * std::max(1.0, span);
    observe(t0, x);
    double t = t0;
    for (std::size_t k = 1; k <= steps + (partial ? 1 : 0); ++k) {
        const double t_next = k <= steps ? t0 + static_cast<double>(k) * h : t_end;
        x = rk4_step(f, t, x, t_next - t);
        t = t_next;
        if (!x.allFinite()) {
            std::ostringstream os;
            os << "rk4_integrate: state became non-finite at t = " << t;
            throw Error(ErrorKind::Diverged, os.str());
        }
        observe(t, x);
    }
}

} // namespace netcontract::ode
