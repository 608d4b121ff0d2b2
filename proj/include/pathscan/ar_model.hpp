#pragma once

// Closed-form AR(1)-on-a-path covariance algebra.
//
// A path of k nodes carries the stationary AR(1) law with correlation psi:
// Gamma_{i,j} = psi^{|i-j|}.  Its inverse is tridiagonal with entries fixed
// by the conditional (GMRF) representation through phi = psi/(1+psi^2) and
// sigma2_phi = (1-psi^2)/(1+psi^2), and log det Gamma = (k-1) log(1-psi^2).
// Everything here is O(1) per entry / O(k) per quadratic form; dense
// inversion appears only in test oracles.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pathscan {

/// Correlation strength psi with its derived GMRF parameters.  psi is the
/// single source of truth; phi and sigma2_phi are always recomputed.
struct CorrelationModel {
    double psi;

    explicit CorrelationModel(double psi_value) : psi(psi_value) {
        if (!(psi > -1.0 && psi < 1.0))
            throw std::domain_error("CorrelationModel: psi must lie in (-1, 1)");
    }

    double phi() const { return psi / (1.0 + psi * psi); }
    double sigma2_phi() const {
        return (1.0 - psi * psi) / (1.0 + psi * psi);
    }
};

/// The k x k covariance Gamma_{i,j} = psi^{|i-j|} with closed-form inverse
/// and determinant.  Indices are 0-based.
class ARCovariance {
  public:
    ARCovariance(int k, double psi) : k_(k), psi_(psi) {
        if (k < 2) throw std::domain_error("ARCovariance: k must be >= 2");
        if (!(psi > -1.0 && psi < 1.0))
            throw std::domain_error("ARCovariance: psi must lie in (-1, 1)");
    }

    int k() const { return k_; }
    double psi() const { return psi_; }

    double entry(int i, int j) const {
        check_index(i);
        check_index(j);
        return std::pow(psi_, std::abs(i - j));
    }

    /// Closed-form inverse entry: interior diagonal (1+psi^2)/(1-psi^2),
    /// endpoint diagonal 1/(1-psi^2), first off-diagonals -psi/(1-psi^2),
    /// zero beyond.
    double inverse_entry(int i, int j) const {
        check_index(i);
        check_index(j);
        const double denom = 1.0 - psi_ * psi_;
        if (i == j) {
            const bool endpoint = (i == 0 || i == k_ - 1);
            return endpoint ? 1.0 / denom : (1.0 + psi_ * psi_) / denom;
        }
        if (std::abs(i - j) == 1) return -psi_ / denom;
        return 0.0;
    }

    std::vector<std::vector<double>> inverse_dense() const {
        std::vector<std::vector<double>> out(
            static_cast<std::size_t>(k_),
            std::vector<double>(static_cast<std::size_t>(k_), 0.0));
        for (int i = 0; i < k_; ++i)
            for (int j = std::max(0, i - 1); j <= std::min(k_ - 1, i + 1); ++j)
                out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    inverse_entry(i, j);
        return out;
    }

    /// log det Gamma = (k-1) log(1 - psi^2).
    double log_det() const { return (k_ - 1) * std::log1p(-psi_ * psi_); }

  private:
    void check_index(int i) const {
        if (i < 0 || i >= k_)
            throw std::domain_error("ARCovariance: index out of range");
    }

    int k_;
    double psi_;
};

/// Convenience free functions mirroring the covariance accessors.
inline std::vector<std::vector<double>> gamma_inverse(const ARCovariance& cov) {
    return cov.inverse_dense();
}

inline double log_det_gamma(const ARCovariance& cov) { return cov.log_det(); }

/// x^T Gamma^{-1} x via the tridiagonal closed form, O(k).
inline double quad_form_inverse(const std::vector<double>& x, double psi) {
    const auto k = x.size();
    if (k < 2)
        throw std::domain_error("quad_form_inverse: need at least 2 coordinates");
    const double denom = 1.0 - psi * psi;
    double interior = 0.0;
    for (std::size_t j = 1; j + 1 < k; ++j) interior += x[j] * x[j];
    double cross = 0.0;
    for (std::size_t j = 0; j + 1 < k; ++j) cross += x[j] * x[j + 1];
    return (x.front() * x.front() + x.back() * x.back() +
            (1.0 + psi * psi) * interior - 2.0 * psi * cross) /
           denom;
}

}  // namespace pathscan
