#pragma once

// Brute-force dense linear algebra used only as a test oracle: LU with
// partial pivoting for determinants and inverses, plain O(k^3) multiply.
// Deliberately independent of the closed forms under test.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix gamma_dense(int k, double psi) {
    Matrix g(static_cast<std::size_t>(k),
             std::vector<double>(static_cast<std::size_t>(k)));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                std::pow(psi, std::abs(i - j));
    return g;
}

struct LU {
    Matrix lu;                  // packed L (unit diagonal) and U
    std::vector<std::size_t> perm;
    int sign = 1;
};

inline LU lu_decompose(Matrix a) {
    const std::size_t n = a.size();
    LU out;
    out.perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.perm[i] = i;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0)
            throw std::runtime_error("lu_decompose: singular matrix");
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            std::swap(out.perm[pivot], out.perm[col]);
            out.sign = -out.sign;
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            a[r][col] /= a[col][col];
            for (std::size_t c = col + 1; c < n; ++c)
                a[r][c] -= a[r][col] * a[col][c];
        }
    }
    out.lu = std::move(a);
    return out;
}

/// log(det A); requires det A > 0.
inline double lu_log_det(const Matrix& a) {
    LU f = lu_decompose(a);
    double log_abs = 0.0;
    int sign = f.sign;
    for (std::size_t i = 0; i < f.lu.size(); ++i) {
        const double u = f.lu[i][i];
        if (u < 0.0) sign = -sign;
        log_abs += std::log(std::fabs(u));
    }
    if (sign <= 0) throw std::runtime_error("lu_log_det: determinant not positive");
    return log_abs;
}

inline std::vector<double> lu_solve(const LU& f, std::vector<double> b) {
    const std::size_t n = f.lu.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu[i][j] * x[j];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu[i][j] * x[j];
        x[i] /= f.lu[i][i];
    }
    return x;
}

inline Matrix lu_inverse(const Matrix& a) {
    const std::size_t n = a.size();
    LU f = lu_decompose(a);
    Matrix inv(n, std::vector<double>(n, 0.0));
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<double> e(n, 0.0);
        e[col] = 1.0;
        std::vector<double> x = lu_solve(f, std::move(e));
        for (std::size_t row = 0; row < n; ++row) inv[row][col] = x[row];
    }
    return inv;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.size();
    const std::size_t m = b[0].size();
    const std::size_t inner = b.size();
    Matrix out(n, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < inner; ++k)
            for (std::size_t j = 0; j < m; ++j)
                out[i][j] += a[i][k] * b[k][j];
    return out;
}

inline double quad_form(const Matrix& a, const std::vector<double>& x) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            total += x[i] * a[i][j] * x[j];
    return total;
}

}  // namespace oracle
