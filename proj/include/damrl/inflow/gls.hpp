#pragma once

#include <span>
#include <vector>

namespace damrl::inflow {

/// Regression input for one day: [1, rf_today, rf_lag1, ..., rf_lag(K-1)],
/// optionally followed by an auxiliary regressor (see filter.hpp).
using DesignVector = std::vector<double>;

/// Builds the plain rainfall design vector. `lags` holds the K-1 preceding
/// days, most recent first.
DesignVector design_vector(double rf_today_mm, std::span<const double> lags_mm);

/// Linear inflow model with AR(1) residual structure.
struct GlsModel {
    std::vector<double> coefficients; // intercept first, BCM/day units
    double rho = 0.0;                 // lag-1 residual autocorrelation, |rho| < 1
    double sigma2 = 0.0;              // innovation variance of the AR(1) residual
};

/// Iterated feasible GLS (Cochrane-Orcutt): OLS fit, estimate rho from the
/// lag-1 residual autocorrelation, quasi-difference, refit; repeats until rho
/// moves by < 1e-6 or 50 iterations. `rainfall` and `inflow` are aligned
/// daily series; rows use `k` rainfall values (today plus k-1 lags).
/// Throws std::invalid_argument for series shorter than 10*(k+1) and
/// std::runtime_error for a rank-deficient design.
GlsModel fit_gls(std::span<const double> rainfall_mm, std::span<const double> inflow_bcm, int k);

/// Unconditional mean prediction coefficients^T x, floored at 0.
/// Throws std::invalid_argument on dimension mismatch.
double gls_predict(const GlsModel& model, const DesignVector& x);

} // namespace damrl::inflow
