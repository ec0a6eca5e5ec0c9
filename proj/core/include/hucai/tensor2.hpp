#pragma once

#include <cmath>

namespace hucai {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
constexpr double norm2(const Vec2& a) { return dot(a, a); }

/// Row-major 2x2 matrix.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Mat2 outer(const Vec2& a, const Vec2& b) {
        return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y};
    }

    constexpr Mat2& operator+=(const Mat2& o) {
        a11 += o.a11; a12 += o.a12; a21 += o.a21; a22 += o.a22;
        return *this;
    }
    constexpr Mat2& operator-=(const Mat2& o) {
        a11 -= o.a11; a12 -= o.a12; a21 -= o.a21; a22 -= o.a22;
        return *this;
    }
    constexpr Mat2& operator*=(double s) {
        a11 *= s; a12 *= s; a21 *= s; a22 *= s;
        return *this;
    }
    friend constexpr Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
    friend constexpr Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
    friend constexpr Mat2 operator*(double s, Mat2 a) { return a *= s; }
    friend constexpr Mat2 operator*(const Mat2& a, const Mat2& b) {
        return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
                a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
    }
    friend constexpr Vec2 operator*(const Mat2& a, const Vec2& v) {
        return {a.a11 * v.x + a.a12 * v.y, a.a21 * v.x + a.a22 * v.y};
    }
    friend constexpr bool operator==(const Mat2&, const Mat2&) = default;

    constexpr Mat2 transposed() const { return {a11, a21, a12, a22}; }
    constexpr double trace() const { return a11 + a22; }
    constexpr double det() const { return a11 * a22 - a12 * a21; }
};

/// Frobenius inner product A:B.
constexpr double contract(const Mat2& a, const Mat2& b) {
    return a.a11 * b.a11 + a.a12 * b.a12 + a.a21 * b.a21 + a.a22 * b.a22;
}
inline double frobenius(const Mat2& a) { return std::sqrt(contract(a, a)); }

/// Eigenvalues of the symmetric part, smallest first.
inline void symmetric_eigenvalues(const Mat2& a, double& lo, double& hi) {
    const double off = 0.5 * (a.a12 + a.a21);
    const double mean = 0.5 * (a.a11 + a.a22);
    const double rad = std::hypot(0.5 * (a.a11 - a.a22), off);
    lo = mean - rad;
    hi = mean + rad;
}

}  // namespace hucai
