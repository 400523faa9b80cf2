#pragma once

#include <Eigen/Dense>
#include <vector>

#include "damrl/inflow/gls.hpp"

namespace damrl::inflow {

/// Univariate dynamic linear regression: identity state evolution with
/// discount-factor evolution variance. Models are values — forecast is pure,
/// update returns a new state.
struct DlmModel {
    Eigen::VectorXd mean;       // posterior coefficient means m_t
    Eigen::MatrixXd covariance; // posterior coefficient covariance C_t
    double obs_variance = 1.0;  // V
    double discount = 0.98;     // delta in (0, 1]
};

/// Prior state: mean = prior_mean (zeros when empty), covariance =
/// prior_scale * I. Throws std::invalid_argument for dim < 1, prior_scale
/// <= 0, obs_variance <= 0, or discount outside (0, 1].
DlmModel dlm_init(int dim, const std::vector<double>& prior_mean, double prior_scale,
                  double obs_variance, double discount);

struct DlmForecast {
    double mean = 0.0;
    double variance = 0.0; // always > 0
};

/// One-step-ahead forecast: R = C/delta, f = x^T m, q = x^T R x + V.
/// Throws std::invalid_argument on dimension mismatch.
DlmForecast dlm_forecast(const DlmModel& model, const DesignVector& x);

/// Kalman/Bayes update on observation y: e = y - f, A = R x / q,
/// m' = m + A e, C' = R - A A^T q (re-symmetrized). Throws
/// std::invalid_argument on dimension mismatch or non-finite y and
/// std::runtime_error when q <= 0 (numerical degeneracy).
DlmModel dlm_update(const DlmModel& model, const DesignVector& x, double y);

} // namespace damrl::inflow
