#ifndef DSBEAM_FRACTIONAL_DELAY_HPP
#define DSBEAM_FRACTIONAL_DELAY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace dsbeam::detail {

// Cubic Lagrange weights for a read at integer base + x, x in [0, 1).
// Taps cover base-1 .. base+2. Linear interpolation is not good enough here:
// its frac-dependent passband loss is large enough to displace beam-pattern
// peaks by more than a grid step near endfire.
struct LagrangeWeights {
    double w[4];
    explicit LagrangeWeights(double x) {
        w[0] = -x * (x - 1.0) * (x - 2.0) / 6.0;
        w[1] = (x * x - 1.0) * (x - 2.0) / 2.0;
        w[2] = -x * (x + 1.0) * (x - 2.0) / 2.0;
        w[3] = x * (x * x - 1.0) / 6.0;
    }
};

inline double sample_at(std::span<const double> buf, double pos) {
    const double fl = std::floor(pos);
    const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(fl);
    const double x = pos - fl;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(buf.size());
    if (x == 0.0) return (k >= 0 && k < n) ? buf[static_cast<std::size_t>(k)] : 0.0;
    const LagrangeWeights lw(x);
    double acc = 0.0;
    for (int t = 0; t < 4; ++t) {
        const std::ptrdiff_t i = k - 1 + t;
        if (i >= 0 && i < n) acc += lw.w[t] * buf[static_cast<std::size_t>(i)];
    }
    return acc;
}

// out[t] += gain * in[t - delay_samples], out-of-range input treated as zero.
// The shift is constant across t, so the four tap weights are hoisted and the
// in-bounds core runs as one fused loop.
inline void add_shifted(std::span<double> out, std::span<const double> in, double delay_samples,
                        double gain = 1.0) {
    const std::ptrdiff_t n_out = static_cast<std::ptrdiff_t>(out.size());
    const std::ptrdiff_t n_in = static_cast<std::ptrdiff_t>(in.size());
    const double fl = std::floor(delay_samples);
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(fl);
    const double a = delay_samples - fl;

    if (a == 0.0) {
        // integer shift: out[t] += gain * in[t - m]
        const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, m);
        const std::ptrdiff_t t1 = std::min(n_out, n_in + m);
        const double* src = in.data();
        double* dst = out.data();
        for (std::ptrdiff_t t = t0; t < t1; ++t) dst[t] += gain * src[t - m];
        return;
    }

    // in(t - m - a): taps at t-m-2 .. t-m+1 with weights for x = 1 - a.
    const LagrangeWeights lw(1.0 - a);
    const double c0 = gain * lw.w[0], c1 = gain * lw.w[1], c2 = gain * lw.w[2],
                 c3 = gain * lw.w[3];
    auto edge = [&](std::ptrdiff_t t) {
        double acc = 0.0;
        const std::ptrdiff_t base = t - m - 2;
        for (int q = 0; q < 4; ++q) {
            const std::ptrdiff_t i = base + q;
            if (i >= 0 && i < n_in) acc += lw.w[q] * in[static_cast<std::size_t>(i)];
        }
        out[static_cast<std::size_t>(t)] += gain * acc;
    };
    // t with any in-bounds tap: t-m+1 >= 0 and t-m-2 <= n_in-1
    const std::ptrdiff_t span_lo = std::clamp<std::ptrdiff_t>(m - 1, 0, n_out);
    const std::ptrdiff_t span_hi = std::clamp<std::ptrdiff_t>(n_in + m + 2, span_lo, n_out);
    // t with all four taps in bounds
    const std::ptrdiff_t core_lo = std::clamp<std::ptrdiff_t>(m + 2, span_lo, span_hi);
    const std::ptrdiff_t core_hi = std::clamp<std::ptrdiff_t>(n_in + m - 1, core_lo, span_hi);
    for (std::ptrdiff_t t = span_lo; t < core_lo; ++t) edge(t);
    if (core_hi > core_lo) {
        const double* s = in.data();
        double* o = out.data();
        for (std::ptrdiff_t t = core_lo; t < core_hi; ++t) {
            const std::ptrdiff_t b = t - m - 2;
            o[t] += c0 * s[b] + c1 * s[b + 1] + c2 * s[b + 2] + c3 * s[b + 3];
        }
    }
    for (std::ptrdiff_t t = core_hi; t < span_hi; ++t) edge(t);
}

}  // namespace dsbeam::detail

#endif
