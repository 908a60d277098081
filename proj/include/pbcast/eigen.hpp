#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pbcast/error.hpp"
#include "pbcast/matrix.hpp"

namespace pbcast {

namespace detail {

inline double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Diagonal similarity scaling by powers of the radix (no rounding error).
// Classic EISPACK balanc, eigenvalue-only variant: the scale factors are
// not recorded because no back-transformation is needed.
inline void balance_in_place(Matrix& a) {
    const int n = a.rows();
    const double radix = std::numeric_limits<double>::radix;
    const double sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            if (c != 0.0 && r != 0.0) {
                double g = r / radix;
                double f = 1.0;
                const double s = c + r;
                while (c < g) {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while (c > g) {
                    f /= radix;
                    c /= sqrdx;
                }
                if ((c + r) / f < 0.95 * s) {
                    done = false;
                    g = 1.0 / f;
                    for (int j = 0; j < n; ++j) a(i, j) *= g;
                    for (int j = 0; j < n; ++j) a(j, i) *= f;
                }
            }
        }
    }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transformations (EISPACK elmhes). Junk below the subdiagonal is zeroed.
inline void hessenberg_in_place(Matrix& a) {
    const int n = a.rows();
    for (int m = 1; m < n - 1; ++m) {
        double x = 0.0;
        int piv = m;
        for (int j = m; j < n; ++j)
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                piv = j;
            }
        if (piv != m) {
            for (int j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
            for (int j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
        }
        if (x != 0.0) {
            for (int i = m + 1; i < n; ++i) {
                double y = a(i, m - 1);
                if (y != 0.0) {
                    y /= x;
                    a(i, m - 1) = y;
                    for (int j = m; j < n; ++j) a(i, j) -= y * a(m, j);
                    for (int j = 0; j < n; ++j) a(j, m) += y * a(j, i);
                }
            }
        }
    }
    for (int i = 2; i < n; ++i)
        for (int j = 0; j < i - 1; ++j) a(i, j) = 0.0;
}

// Eigenvalues of an upper Hessenberg matrix by the implicit double-shift QR
// iteration (Francis steps), following the classic EISPACK hqr routine.
// Complex conjugate pairs come out of the trailing 2x2 blocks.
inline std::vector<std::complex<double>> hqr_eigenvalues(Matrix& a) {
    const int n = a.rows();
    std::vector<std::complex<double>> wri(n);
    const double eps = std::numeric_limits<double>::epsilon();
    constexpr int max_its = 40;  // per eigenvalue, with exceptional shifts every 10

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l > 0; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {  // one real eigenvalue isolated
                wri[nn--] = x + t;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {  // a 2x2 block isolated
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        wri[nn - 1] = wri[nn] = x + z;
                        if (z != 0.0) wri[nn] = x - w / z;
                    } else {
                        wri[nn] = std::complex<double>(x + p, -z);
                        wri[nn - 1] = std::conj(wri[nn]);
                    }
                    nn -= 2;
                } else {
                    if (its == max_its)
                        throw Error(errc::non_convergence,
                                    "eigensolver: QR iteration exceeded " +
                                        std::to_string(max_its) +
                                        " steps for one eigenvalue");
                    if (its > 0 && its % 10 == 0) {  // exceptional shift
                        t += x;
                        for (int i = 0; i < nn + 1; ++i) a(i, i) -= x;
                        double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        double s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) +
                                                        std::abs(z) + std::abs(a(m + 1, m + 1)));
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
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                        if (s != 0.0) {
                            if (k == m) {
                                if (l != m) a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            double yy = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j < nn + 1; ++j) {  // row modification
                                double pp = a(k, j) + q * a(k + 1, j);
                                if (k + 1 != nn) {
                                    pp += r * a(k + 2, j);
                                    a(k + 2, j) -= pp * z;
                                }
                                a(k + 1, j) -= pp * yy;
                                a(k, j) -= pp * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i < mmin + 1; ++i) {  // column modification
                                double pp = x * a(i, k) + yy * a(i, k + 1);
                                if (k + 1 != nn) {
                                    pp += z * a(i, k + 2);
                                    a(i, k + 2) -= pp * r;
                                }
                                a(i, k + 1) -= pp * q;
                                a(i, k) -= pp;
                            }
                        }
                    }
                }
            }
        } while (l + 1 < nn);
    }
    return wri;
}

}  // namespace detail

// All eigenvalues of a dense real square matrix. The matrix is balanced,
// reduced to Hessenberg form, and iterated to quasi-triangular form; only
// the eigenvalues are kept. Throws on QR non-convergence.
inline std::vector<std::complex<double>> eigenvalues(Matrix a) {
    if (!a.square()) throw Error(errc::domain, "eigenvalues: matrix must be square");
    const int n = a.rows();
    if (n == 0) return {};
    if (n == 1) return {std::complex<double>(a(0, 0), 0.0)};
    detail::balance_in_place(a);
    detail::hessenberg_in_place(a);
    return detail::hqr_eigenvalues(a);
}

inline double spectral_radius(Matrix a) {
    double r = 0.0;
    for (const auto& ev : eigenvalues(std::move(a))) r = std::max(r, std::abs(ev));
    return r;
}

}  // namespace pbcast
