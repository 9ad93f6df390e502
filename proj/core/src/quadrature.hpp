#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "isirate/error.hpp"

namespace isirate::detail {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

// Adaptive Gauss-Kronrod on [a, b] cut into pieces no wider than `width`.
// Boost derives its absolute tolerance from the top-level estimate, so short
// pieces keep each local tolerance meaningful when the integrand is very
// unevenly distributed.
template <class F>
QuadResult integrate_pieces(F&& f, double a, double b, double width, double rel_tol,
                            unsigned max_depth = 12)
{
    QuadResult out;
    if (!(b > a))
        return out;
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / width)));
    const double step = (b - a) / static_cast<double>(pieces);
    for (std::size_t i = 0; i < pieces; ++i) {
        const double lo = a + step * static_cast<double>(i);
        const double hi = (i + 1 == pieces) ? b : lo + step;
        double err = 0.0;
        const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            f, lo, hi, max_depth, rel_tol, &err);
        if (!std::isfinite(v))
            throw Error(ErrorCode::NonConvergent, "non-finite quadrature value");
        out.value += v;
        out.error += err;
    }
    return out;
}

// Same as integrate_pieces but over the union of sorted breakpoints.
template <class F>
QuadResult integrate_breaks(F&& f, std::vector<double> breaks, double width, double rel_tol,
                            unsigned max_depth = 12)
{
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    QuadResult out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        auto r = integrate_pieces(f, breaks[i], breaks[i + 1], width, rel_tol, max_depth);
        out.value += r.value;
        out.error += r.error;
    }
    return out;
}

} // namespace isirate::detail
