#include "damrl/inflow/gls.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace damrl::inflow {

DesignVector design_vector(double rf_today_mm, std::span<const double> lags_mm) {
    DesignVector x;
    x.reserve(2 + lags_mm.size());
    x.push_back(1.0);
    x.push_back(rf_today_mm);
    x.insert(x.end(), lags_mm.begin(), lags_mm.end());
    return x;
}

namespace {

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < x.cols()) {
        throw std::runtime_error("fit_gls: rank-deficient design matrix (rank " +
                                 std::to_string(qr.rank()) + " of " + std::to_string(x.cols()) +
                                 " columns)");
    }
    return qr.solve(y);
}

} // namespace

GlsModel fit_gls(std::span<const double> rainfall_mm, std::span<const double> inflow_bcm, int k) {
    if (k < 1) throw std::invalid_argument("fit_gls: k must be >= 1");
    if (rainfall_mm.size() != inflow_bcm.size()) {
        throw std::invalid_argument("fit_gls: rainfall and inflow series lengths differ");
    }
    const long n = static_cast<long>(rainfall_mm.size());
    if (n < 10L * (k + 1)) {
        throw std::invalid_argument("fit_gls: series of length " + std::to_string(n) +
                                    " is too short for k=" + std::to_string(k) +
                                    " (need at least " + std::to_string(10L * (k + 1)) + ")");
    }
    const long rows = n - k + 1;
    const long cols = k + 1;
    Eigen::MatrixXd x(rows, cols);
    Eigen::VectorXd y(rows);
    for (long r = 0; r < rows; ++r) {
        const long t = r + k - 1; // day index of the row
        x(r, 0) = 1.0;
        for (long j = 0; j < k; ++j) x(r, 1 + j) = rainfall_mm[static_cast<std::size_t>(t - j)];
        y(r) = inflow_bcm[static_cast<std::size_t>(t)];
    }

    Eigen::VectorXd beta = solve_least_squares(x, y);
    double rho = 0.0;
    for (int iter = 0; iter < 50; ++iter) {
        const Eigen::VectorXd resid = y - x * beta;
        double num = 0.0, den = 0.0;
        for (long r = 1; r < rows; ++r) {
            num += resid(r) * resid(r - 1);
            den += resid(r - 1) * resid(r - 1);
        }
        double rho_new = den > 1e-14 * static_cast<double>(rows) ? num / den : 0.0;
        rho_new = std::clamp(rho_new, -0.999, 0.999);
        const bool converged = std::abs(rho_new - rho) < 1e-6;
        rho = rho_new;
        // Quasi-difference and refit with the updated rho.
        Eigen::MatrixXd xd(rows - 1, cols);
        Eigen::VectorXd yd(rows - 1);
        for (long r = 1; r < rows; ++r) {
            xd.row(r - 1) = x.row(r) - rho * x.row(r - 1);
            yd(r - 1) = y(r) - rho * y(r - 1);
        }
        beta = solve_least_squares(xd, yd);
        if (converged) break;
    }

    const Eigen::VectorXd resid = y - x * beta;
    double ss = 0.0;
    for (long r = 1; r < rows; ++r) {
        const double innovation = resid(r) - rho * resid(r - 1);
        ss += innovation * innovation;
    }
    GlsModel model;
    model.coefficients.assign(beta.data(), beta.data() + beta.size());
    model.rho = rho;
    model.sigma2 = std::max(ss / static_cast<double>(rows - 1), 1e-30);
    return model;
}

double gls_predict(const GlsModel& model, const DesignVector& x) {
    if (model.coefficients.size() != x.size()) {
        throw std::invalid_argument("gls_predict: design vector length " +
                                    std::to_string(x.size()) + " does not match model with " +
                                    std::to_string(model.coefficients.size()) + " coefficients");
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mean += model.coefficients[i] * x[i];
    return std::max(0.0, mean);
}

} // namespace damrl::inflow
