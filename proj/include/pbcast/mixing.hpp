#pragma once

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "pbcast/centrality.hpp"
#include "pbcast/eigen.hpp"
#include "pbcast/error.hpp"
#include "pbcast/graph.hpp"
#include "pbcast/matrix.hpp"
#include "pbcast/schedule.hpp"

namespace pbcast {

// Base mixing matrix W = I - epsilon*L together with the step size it was
// built from. W is symmetric and doubly stochastic; per-round and expected
// variants derived from it are only row stochastic.
struct MixingMatrix {
    Matrix w;
    double epsilon = 0.0;

    int n() const { return w.rows(); }
};

inline double default_epsilon(const Graph& g) { return 1.0 / (g.max_degree() + 1); }

inline MixingMatrix base_mixing_matrix(const Graph& g, double epsilon) {
    const int max_deg = g.max_degree();
    const double bound = 1.0 / max_deg;
    if (!(epsilon > 0.0) || !(epsilon < bound))
        throw Error(errc::domain,
                    "step size must satisfy 0 < epsilon < 1/max_degree = " +
                        format_double(bound) + " (got " + format_double(epsilon) + ")");
    Matrix w = Matrix::identity(g.n());
    for (const auto& [i, j] : g.edges()) {
        w(i, j) = epsilon;
        w(j, i) = epsilon;
        w(i, i) -= epsilon;
        w(j, j) -= epsilon;
    }
    return MixingMatrix{std::move(w), epsilon};
}

// Round matrix for schedule v: nodes that stay silent contribute nothing and
// their weight folds into the receiver's self-loop, keeping rows stochastic.
//   entry(i,j) = w_ij * v_j            (j != i)
//   entry(i,i) = 1 - sum_{k != i} w_ik * v_k
inline Matrix round_matrix(const MixingMatrix& base, const ScheduleVector& sched) {
    const int n = base.n();
    if (sched.size() != n)
        throw Error(errc::domain, "round_matrix: schedule length does not match matrix");
    Matrix out(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = 1.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double wij = base.w(i, j) * sched.v[j];
            out(i, j) = wij;
            diag -= wij;
        }
        out(i, i) = diag;
    }
    return out;
}

// Entrywise expectation of the round matrix under independent Bernoulli
// scheduling: replace v_j by its mean p_j.
inline Matrix expected_matrix(const MixingMatrix& base, const ProbabilityVector& p) {
    const int n = base.n();
    if (p.size() != n)
        throw Error(errc::domain, "expected_matrix: probability length does not match matrix");
    Matrix out(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = 1.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double wij = base.w(i, j) * p.p[j];
            out(i, j) = wij;
            diag -= wij;
        }
        out(i, i) = diag;
    }
    return out;
}

// rho(M - u u^T / N): the modulus of the dominant eigenvalue once the
// consensus direction is projected out. This is the convergence-rate
// surrogate minimized by the probability optimizer.
inline double projected_spectral_radius(const Matrix& m) {
    if (!m.square()) throw Error(errc::domain, "projected_spectral_radius: matrix not square");
    const int n = m.rows();
    Matrix b = m;
    const double shift = 1.0 / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) -= shift;
    return spectral_radius(std::move(b));
}

inline double projected_spectral_radius(const MixingMatrix& m) {
    return projected_spectral_radius(m.w);
}

// Convergence diagnostics for an averaging matrix:
//   1. M u = u          (row sums)
//   2. u^T M = u^T      (column sums)
//   3. rho(M - u u^T/N) < 1
struct SpectrumReport {
    std::vector<double> moduli;  // of M itself, descending
    double projected_radius = 0.0;
    double max_row_deviation = 0.0;
    double max_col_deviation = 0.0;
    bool fixes_ones_right = false;  // condition 1
    bool fixes_ones_left = false;   // condition 2
    bool contracts = false;         // condition 3

    bool all_conditions() const {
        return fixes_ones_right && fixes_ones_left && contracts;
    }
};

inline SpectrumReport verify_convergence_conditions(const Matrix& m,
                                                    double sum_tol = 1e-9) {
    if (!m.square())
        throw Error(errc::domain, "verify_convergence_conditions: matrix not square");
    SpectrumReport rep;
    const int n = m.rows();
    for (int i = 0; i < n; ++i) {
        rep.max_row_deviation = std::max(rep.max_row_deviation, std::abs(m.row_sum(i) - 1.0));
        rep.max_col_deviation = std::max(rep.max_col_deviation, std::abs(m.col_sum(i) - 1.0));
    }
    rep.fixes_ones_right = rep.max_row_deviation <= sum_tol;
    rep.fixes_ones_left = rep.max_col_deviation <= sum_tol;

    for (const auto& ev : eigenvalues(m)) rep.moduli.push_back(std::abs(ev));
    std::sort(rep.moduli.begin(), rep.moduli.end(), std::greater<>());

    rep.projected_radius = projected_spectral_radius(m);
    rep.contracts = rep.projected_radius < 1.0;
    return rep;
}

inline SpectrumReport verify_convergence_conditions(const MixingMatrix& m,
                                                    double sum_tol = 1e-9) {
    return verify_convergence_conditions(m.w, sum_tol);
}

inline std::string render_spectrum_report(const SpectrumReport& rep) {
    std::ostringstream out;
    auto flag = [](bool b) { return b ? "pass" : "FAIL"; };
    out << "condition 1 (W u = u):        " << flag(rep.fixes_ones_right)
        << "  (max row-sum deviation " << format_double(rep.max_row_deviation) << ")\n";
    out << "condition 2 (u^T W = u^T):    " << flag(rep.fixes_ones_left)
        << "  (max column-sum deviation " << format_double(rep.max_col_deviation) << ")\n";
    out << "condition 3 (rho(W - uu^T/N) < 1): " << flag(rep.contracts)
        << "  (rho = " << format_double(rep.projected_radius) << ")\n";
    out << "eigenvalue moduli (descending):";
    const std::size_t shown = std::min<std::size_t>(rep.moduli.size(), 8);
    for (std::size_t i = 0; i < shown; ++i) out << ' ' << format_double(rep.moduli[i]);
    if (rep.moduli.size() > shown) out << " ...";
    out << '\n';
    return out.str();
}

}  // namespace pbcast
