#pragma once

#include <array>
#include <cmath>

#include "advsamp/dual.hpp"
#include "advsamp/errors.hpp"

namespace advsamp {

// Minimal 3-vector ops templated on scalar so they work with Dual types.
template <typename S>
using Vec3 = std::array<S, 3>;

template <typename S>
Vec3<S> vsub(const Vec3<S>& a, const Vec3<S>& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

template <typename S>
Vec3<S> vcross(const Vec3<S>& a, const Vec3<S>& b) {
    return {a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

template <typename S>
S vdot(const Vec3<S>& a, const Vec3<S>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <typename S>
S vnorm(const Vec3<S>& a) {
    return sqrt(vdot(a, a));
}

// Signed dihedral in (-pi, pi] for points p1-p2-p3-p4, positive by the
// right-hand rule about the p2->p3 bond.
template <typename S>
S dihedral(const Vec3<S>& p1, const Vec3<S>& p2, const Vec3<S>& p3, const Vec3<S>& p4) {
    const Vec3<S> b1 = vsub(p2, p1);
    const Vec3<S> b2 = vsub(p3, p2);
    const Vec3<S> b3 = vsub(p4, p3);
    const Vec3<S> n1 = vcross(b1, b2);
    const Vec3<S> n2 = vcross(b2, b3);
    if (value_of(vnorm(n1)) < 1e-10 || value_of(vnorm(n2)) < 1e-10) {
        throw Error::geometry_error("dihedral: collinear atom triple");
    }
    const S b2n = vnorm(b2);
    const Vec3<S> m = vcross(n1, {b2[0] / b2n, b2[1] / b2n, b2[2] / b2n});
    const S x = vdot(n1, n2);
    const S y = vdot(m, n2);
    return atan2(y, x);
}

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    const double two_pi = 2.0 * M_PI;
    a = std::fmod(a, two_pi);
    if (a <= -M_PI) a += two_pi;
    if (a > M_PI) a -= two_pi;
    return a;
}

}  // namespace advsamp
