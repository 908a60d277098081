#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

#include "pbcast/error.hpp"

namespace pbcast {

// Dense row-major matrix. Sizes here are simulator scale (N <= a few hundred),
// so no blocking or expression tricks, just contiguous storage.
class Matrix {
public:
    Matrix() = default;

    Matrix(int rows, int cols, double fill = 0.0) {
        if (rows < 0 || cols < 0)
            throw Error(errc::domain, "matrix dimensions must be nonnegative");
        rows_ = rows;
        cols_ = cols;
        a_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(int i, int j) {
        return a_[static_cast<std::size_t>(i) * cols_ + j];
    }
    double operator()(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * cols_ + j];
    }

    const std::vector<double>& data() const { return a_; }

    double row_sum(int i) const {
        double s = 0.0;
        for (int j = 0; j < cols_; ++j) s += (*this)(i, j);
        return s;
    }

    double col_sum(int j) const {
        double s = 0.0;
        for (int i = 0; i < rows_; ++i) s += (*this)(i, j);
        return s;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw Error(errc::domain, "matrix product: inner dimensions do not match");
    Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline std::vector<double> operator*(const Matrix& a, const std::vector<double>& x) {
    if (a.cols() != static_cast<int>(x.size()))
        throw Error(errc::domain, "matrix-vector product: dimensions do not match");
    std::vector<double> y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(errc::domain, "max_abs_diff: dimensions do not match");
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

// Shortest round-trip decimal representation; used for every number the
// library writes to disk so identical runs produce identical bytes.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline void write_matrix_csv(const Matrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot open for writing: " + path);
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw Error(errc::io, "write failed: " + path);
}

}  // namespace pbcast
