#pragma once

#include <cmath>

namespace advsamp {

// Forward-mode dual number. Nest (Dual<Dual<double>>) for second derivatives.
template <typename T>
struct Dual {
    T v{};  // value
    T d{};  // tangent

    Dual() = default;
    Dual(T value) : v(value) {}
    Dual(T value, T tangent) : v(value), d(tangent) {}

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
};

template <typename T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <typename T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <typename T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <typename T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d};
}
template <typename T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    T q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
}

template <typename T> Dual<T> operator+(const Dual<T>& a, double s) { return {a.v + s, a.d}; }
template <typename T> Dual<T> operator+(double s, const Dual<T>& a) { return {a.v + s, a.d}; }
template <typename T> Dual<T> operator-(const Dual<T>& a, double s) { return {a.v - s, a.d}; }
template <typename T> Dual<T> operator-(double s, const Dual<T>& a) { return {s - a.v, -a.d}; }
template <typename T> Dual<T> operator*(const Dual<T>& a, double s) { return {a.v * s, a.d * s}; }
template <typename T> Dual<T> operator*(double s, const Dual<T>& a) { return {a.v * s, a.d * s}; }
template <typename T> Dual<T> operator/(const Dual<T>& a, double s) { return {a.v / s, a.d / s}; }

using std::cos;
using std::sin;
using std::sqrt;
using std::atan2;
using std::exp;
using std::log;

template <typename T> Dual<T> sin(const Dual<T>& a) { return {sin(a.v), cos(a.v) * a.d}; }
template <typename T> Dual<T> cos(const Dual<T>& a) { return {cos(a.v), T(-1.0) * sin(a.v) * a.d}; }
template <typename T> Dual<T> sqrt(const Dual<T>& a) {
    T r = sqrt(a.v);
    return {r, a.d / (2.0 * r)};
}
template <typename T> Dual<T> exp(const Dual<T>& a) {
    T e = exp(a.v);
    return {e, e * a.d};
}
template <typename T> Dual<T> log(const Dual<T>& a) { return {log(a.v), a.d / a.v}; }
template <typename T> Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
    T denom = x.v * x.v + y.v * y.v;
    return {atan2(y.v, x.v), (x.v * y.d - y.v * x.d) / denom};
}

inline double value_of(double x) { return x; }
template <typename T> auto value_of(const Dual<T>& a) { return value_of(a.v); }

}  // namespace advsamp
