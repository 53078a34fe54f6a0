#pragma once

#include <array>
#include <cmath>

// Minimal fixed-size linear algebra for planar dynamics. Everything here is
// value-semantic and constexpr-friendly; the whole project works in dimension 2.

namespace katok {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm_inf() const { return std::max(std::abs(x), std::abs(y)); }
    Vec2 normalized() const {
        const double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{1.0, 0.0};
    }
    // Counterclockwise perpendicular.
    Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Angle in [0, pi/2] between the lines spanned by a and b.
inline double line_angle(const Vec2& a, const Vec2& b) {
    const double c = std::abs(a.normalized().dot(b.normalized()));
    return std::acos(std::min(1.0, c));
}

// Row-major 2x2 matrix.
struct Mat2 {
    double a = 0.0, b = 0.0;  // row 0
    double c = 0.0, d = 0.0;  // row 1

    Mat2() = default;
    Mat2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diagonal(double p, double q) { return {p, 0.0, 0.0, q}; }
    // Columns u, v.
    static Mat2 from_columns(const Vec2& u, const Vec2& v) { return {u.x, v.x, u.y, v.y}; }

    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 operator*(const Mat2& m) const {
        return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
    }
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2 operator+(const Mat2& m) const { return {a + m.a, b + m.b, c + m.c, d + m.d}; }
    Mat2 operator-(const Mat2& m) const { return {a - m.a, b - m.b, c - m.c, d - m.d}; }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }

    Mat2 inverse() const {
        const double dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    Vec2 column(int j) const { return j == 0 ? Vec2{a, c} : Vec2{b, d}; }
    Vec2 row(int i) const { return i == 0 ? Vec2{a, b} : Vec2{c, d}; }

    // Spectral (operator 2-)norm via the singular values of a 2x2 matrix.
    double op_norm() const {
        const double s = a * a + b * b + c * c + d * d;
        const double dt = det();
        const double disc = std::sqrt(std::max(0.0, s * s - 4.0 * dt * dt));
        return std::sqrt(0.5 * (s + disc));
    }

    double frobenius_norm() const { return std::sqrt(a * a + b * b + c * c + d * d); }

    // max_i ||row_i||_2, the (inf -> 2)-transpose bound used for inradius checks.
    double max_row_norm() const { return std::max(row(0).norm(), row(1).norm()); }
};

// QR decomposition by a single Givens rotation: M = Q R with Q orthogonal
// and R upper triangular with non-negative diagonal.
struct QR2 {
    Mat2 q;
    Mat2 r;
};

inline QR2 qr_decompose(const Mat2& m) {
    const double nrm = std::hypot(m.a, m.c);
    double cth = 1.0, sth = 0.0;
    if (nrm > 0.0) {
        cth = m.a / nrm;
        sth = m.c / nrm;
    }
    // Q = [[cth, -sth], [sth, cth]], R = Q^T M.
    Mat2 r{cth * m.a + sth * m.c, cth * m.b + sth * m.d, 0.0, -sth * m.b + cth * m.d};
    Mat2 q{cth, -sth, sth, cth};
    if (r.d < 0.0) {  // flip second column of Q / second row of R
        r.d = -r.d;
        r.c = -r.c;
        q.b = -q.b;
        q.d = -q.d;
    }
    return {q, r};
}

// Eigenvector of a symmetric-positive problem is not needed; for general 2x2
// with real eigenvalues this returns the eigenvector of the larger eigenvalue.
inline Vec2 dominant_eigenvector(const Mat2& m) {
    const double tr = m.trace();
    const double disc = tr * tr - 4.0 * m.det();
    const double lam = 0.5 * (tr + std::sqrt(std::max(0.0, disc)));
    // (M - lam I) v = 0; pick the better-conditioned row.
    const Vec2 r0{m.a - lam, m.b};
    const Vec2 r1{m.c, m.d - lam};
    const Vec2 v = (r0.norm() > r1.norm()) ? Vec2{-r0.y, r0.x} : Vec2{-r1.y, r1.x};
    return v.norm() > 0 ? v.normalized() : Vec2{1.0, 0.0};
}

}  // namespace katok
