#pragma once

// Eigenvalues by Francis double-shift QR on an upper Hessenberg matrix, polynomial
// roots through the balanced companion matrix, and a dense cross-check.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "ttnet/errors.hpp"

namespace ttnet {

using Complex = std::complex<double>;

namespace linalg {

/// Diagonal similarity by powers of two so row and column norms are comparable.
inline void balance(Eigen::MatrixXd& a) {
    constexpr double radix = 2.0;
    const auto n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                a.row(i) *= g;
                a.col(i) *= f;
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form (similarity).
inline void to_hessenberg(Eigen::MatrixXd& a) {
    const auto n = a.rows();
    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        Eigen::VectorXd v = a.col(k).segment(k + 1, n - k - 1);
        const double alpha = v.norm();
        if (alpha == 0.0) continue;
        const double sign = v(0) >= 0.0 ? 1.0 : -1.0;
        v(0) += sign * alpha;
        const double vn = v.squaredNorm();
        if (vn == 0.0) continue;
        // A <- P A P with P = I - 2 v v^T / (v^T v) acting on rows/cols k+1..n-1
        auto blockR = a.block(k + 1, 0, n - k - 1, n);
        const Eigen::RowVectorXd wr = (v.transpose() * blockR) * (2.0 / vn);
        blockR.noalias() -= v * wr;
        auto blockC = a.block(0, k + 1, n, n - k - 1);
        const Eigen::VectorXd wc = (blockC * v) * (2.0 / vn);
        blockC.noalias() -= wc * v.transpose();
        for (Eigen::Index i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR iteration
/// with exceptional shifts. Zero subdiagonal entries deflate exactly, so triangular
/// input returns its diagonal unchanged.
[[nodiscard]] inline std::vector<Complex> hessenberg_qr(Eigen::MatrixXd a, int max_its_per_value = 60) {
    const int n = static_cast<int>(a.rows());
    std::vector<Complex> w(static_cast<std::size_t>(n));
    const double eps = std::numeric_limits<double>::epsilon();
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    const auto sgn = [](double x, double s) { return s >= 0.0 ? std::abs(x) : -std::abs(x); };

    int nn = n - 1;
    double t = 0.0;
    double p = 0, q = 0, r = 0, s = 0, x = 0, y = 0, z = 0, ww = 0;
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l > 0; --l) {
                s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            x = a(nn, nn);
            if (l == nn) {  // one root
                w[static_cast<std::size_t>(nn--)] = x + t;
            } else {
                y = a(nn - 1, nn - 1);
                ww = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {  // a 2x2 block
                    p = 0.5 * (y - x);
                    q = p * p + ww;
                    z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sgn(z, p);
                        w[static_cast<std::size_t>(nn - 1)] = w[static_cast<std::size_t>(nn)] = x + z;
                        if (z != 0.0) w[static_cast<std::size_t>(nn)] = x - ww / z;
                    } else {
                        w[static_cast<std::size_t>(nn)] = Complex(x + p, -z);
                        w[static_cast<std::size_t>(nn - 1)] = std::conj(w[static_cast<std::size_t>(nn)]);
                    }
                    nn -= 2;
                } else {
                    if (its == max_its_per_value) throw NumericalError("hessenberg_qr: no convergence");
                    if (its % 10 == 0 && its > 0) {  // exceptional shift
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        ww = -0.4375 * s * s;
                    }
                    ++its;
                    int m = nn - 2;
                    for (; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m; i < nn - 1; ++i) {
                        a(i + 2, i) = 0.0;
                        if (i != m) a(i + 2, i - 1) = 0.0;
                    }
                    for (int k = m; k < nn; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k + 1 != nn) r = a(k + 2, k - 1);
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        if ((s = sgn(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
                            if (k == m) {
                                if (l != m) a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                p = a(k, j) + q * a(k + 1, j);
                                if (k + 1 != nn) {
                                    p += r * a(k + 2, j);
                                    a(k + 2, j) -= p * z;
                                }
                                a(k + 1, j) -= p * y;
                                a(k, j) -= p * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                p = x * a(i, k) + y * a(i, k + 1);
                                if (k + 1 != nn) {
                                    p += z * a(i, k + 2);
                                    a(i, k + 2) -= p * r;
                                }
                                a(i, k + 1) -= p * q;
                                a(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (l + 1 < nn);
    }
    return w;
}

/// Sort by real part, then imaginary part.
inline void sort_spectrum(std::vector<Complex>& v) {
    std::sort(v.begin(), v.end(), [](const Complex& a, const Complex& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
}

[[nodiscard]] inline bool is_upper_triangular(const Eigen::MatrixXd& a) {
    for (Eigen::Index i = 1; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j)
            if (a(i, j) != 0.0) return false;
    return true;
}

[[nodiscard]] inline bool is_upper_hessenberg(const Eigen::MatrixXd& a) {
    for (Eigen::Index i = 2; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j + 1 < i; ++j)
            if (a(i, j) != 0.0) return false;
    return true;
}

/// Eigenvalues by the in-house route only.
[[nodiscard]] inline std::vector<Complex> qr_eigenvalues(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("qr_eigenvalues: matrix must be square");
    if (m.rows() == 0) return {};
    Eigen::MatrixXd a = m;
    if (is_upper_triangular(a.transpose()) && !is_upper_triangular(a)) a.transposeInPlace();
    if (!is_upper_triangular(a)) {
        balance(a);
        if (!is_upper_hessenberg(a)) to_hessenberg(a);
    }
    auto w = hessenberg_qr(std::move(a));
    sort_spectrum(w);
    return w;
}

/// Roots of c[0] + c[1] z + ... + c[m] z^m (c[m] != 0) via the companion matrix.
[[nodiscard]] inline std::vector<Complex> polynomial_roots(std::span<const double> c) {
    std::size_t deg = c.size();
    while (deg > 0 && c[deg - 1] == 0.0) --deg;
    if (deg <= 1) return {};
    const auto m = static_cast<Eigen::Index>(deg - 1);
    const double lead = c[deg - 1];
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) comp(0, j) = -c[static_cast<std::size_t>(m - 1 - j)] / lead;
    for (Eigen::Index i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
    balance(comp);  // keeps Hessenberg shape: it is a diagonal similarity
    auto w = hessenberg_qr(std::move(comp));
    sort_spectrum(w);
    return w;
}

/// Product of polynomials given by ascending coefficients.
[[nodiscard]] inline std::vector<double> poly_mul(std::span<const double> a, std::span<const double> b) {
    std::vector<double> r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

/// Cyclic structure: nonzero off-diagonal entries only at (k, k-1) and (0, m-1).
[[nodiscard]] inline bool is_cyclic(const Eigen::MatrixXd& a) {
    const auto m = a.rows();
    if (m < 2) return false;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j) continue;
            const bool allowed = (j + 1 == i) || (i == 0 && j == m - 1);
            if (!allowed && a(i, j) != 0.0) return false;
        }
    return true;
}

/// det(lambda I - A) for cyclic A: prod (lambda - a_kk) - prod(cycle entries), ascending coefficients.
[[nodiscard]] inline std::vector<double> cyclic_characteristic_polynomial(const Eigen::MatrixXd& a) {
    const auto m = a.rows();
    std::vector<double> p{1.0};
    double gain = a(0, m - 1);
    for (Eigen::Index k = 0; k < m; ++k) {
        const double lin[] = {-a(k, k), 1.0};
        p = poly_mul(p, lin);
        if (k > 0) gain *= a(k, k - 1);
    }
    p[0] -= gain;
    return p;
}

/// Dense reference eigenvalues.
[[nodiscard]] inline std::vector<Complex> reference_eigenvalues(const Eigen::MatrixXd& a) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    if (es.info() != Eigen::Success) throw NumericalError("reference eigen solver failed");
    std::vector<Complex> w(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    sort_spectrum(w);
    return w;
}

/// Largest distance between two spectra after greedy nearest matching, scaled by max(1, |lambda|).
[[nodiscard]] inline double spectrum_mismatch(const std::vector<Complex>& a, std::vector<Complex> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const auto& z : a) {
        auto it = std::min_element(b.begin(), b.end(),
                                   [&](const Complex& u, const Complex& v) { return std::abs(u - z) < std::abs(v - z); });
        worst = std::max(worst, std::abs(*it - z) / std::max(1.0, std::abs(z)));
        b.erase(it);
    }
    return worst;
}

}  // namespace linalg

/// Spectrum sorted by real part. Cyclic matrices go through their characteristic polynomial,
/// others through Hessenberg QR (exact for triangular input); both are checked against a
/// dense reference solver.
[[nodiscard]] inline std::vector<Complex> eigenvalues(const Eigen::MatrixXd& a, double agreement = 1e-6) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
    if (!a.allFinite()) throw NumericalError("eigenvalues: non-finite matrix entry");
    std::vector<Complex> own;
    const bool triangular = linalg::is_upper_triangular(a) || linalg::is_upper_triangular(a.transpose());
    if (!triangular && linalg::is_cyclic(a)) {
        const auto p = linalg::cyclic_characteristic_polynomial(a);
        own = linalg::polynomial_roots(p);
    } else {
        own = linalg::qr_eigenvalues(a);
    }
    const auto ref = linalg::reference_eigenvalues(a);
    const double gap = linalg::spectrum_mismatch(own, ref);
    if (!(gap <= agreement))
        throw NumericalError("eigenvalues: routes disagree by " + std::to_string(gap));
    return own;
}

}  // namespace ttnet
