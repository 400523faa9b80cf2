#include "damrl/inflow/dlm.hpp"

#include <cmath>
#include <stdexcept>

namespace damrl::inflow {

DlmModel dlm_init(int dim, const std::vector<double>& prior_mean, double prior_scale,
                  double obs_variance, double discount) {
    if (dim < 1) throw std::invalid_argument("dlm_init: dim must be >= 1");
    if (prior_scale <= 0.0) throw std::invalid_argument("dlm_init: prior_scale must be > 0");
    if (obs_variance <= 0.0) throw std::invalid_argument("dlm_init: obs_variance must be > 0");
    if (!(discount > 0.0) || discount > 1.0) {
        throw std::invalid_argument("dlm_init: discount must lie in (0, 1]");
    }
    if (!prior_mean.empty() && prior_mean.size() != static_cast<std::size_t>(dim)) {
        throw std::invalid_argument("dlm_init: prior_mean length does not match dim");
    }
    DlmModel model;
    model.mean = Eigen::VectorXd::Zero(dim);
    if (!prior_mean.empty()) {
        for (int i = 0; i < dim; ++i) model.mean(i) = prior_mean[static_cast<std::size_t>(i)];
    }
    model.covariance = prior_scale * Eigen::MatrixXd::Identity(dim, dim);
    model.obs_variance = obs_variance;
    model.discount = discount;
    return model;
}

namespace {

Eigen::VectorXd as_eigen(const DlmModel& model, const DesignVector& x, const char* op) {
    if (static_cast<Eigen::Index>(x.size()) != model.mean.size()) {
        throw std::invalid_argument(std::string(op) + ": design vector length " +
                                    std::to_string(x.size()) + " does not match model dim " +
                                    std::to_string(model.mean.size()));
    }
    return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

} // namespace

DlmForecast dlm_forecast(const DlmModel& model, const DesignVector& x) {
    const Eigen::VectorXd xv = as_eigen(model, x, "dlm_forecast");
    const Eigen::MatrixXd r = model.covariance / model.discount;
    DlmForecast f;
    f.mean = xv.dot(model.mean);
    f.variance = xv.dot(r * xv) + model.obs_variance;
    return f;
}

DlmModel dlm_update(const DlmModel& model, const DesignVector& x, double y) {
    if (!std::isfinite(y)) throw std::invalid_argument("dlm_update: non-finite observation");
    const Eigen::VectorXd xv = as_eigen(model, x, "dlm_update");
    const Eigen::MatrixXd r = model.covariance / model.discount;
    const double q = xv.dot(r * xv) + model.obs_variance;
    if (!(q > 0.0) || !std::isfinite(q)) {
        throw std::runtime_error("dlm_update: degenerate forecast variance q = " +
                                 std::to_string(q));
    }
    const double f = xv.dot(model.mean);
    const double e = y - f;
    const Eigen::VectorXd a = (r * xv) / q;
    DlmModel next = model;
    next.mean = model.mean + a * e;
    Eigen::MatrixXd c = r - a * a.transpose() * q;
    next.covariance = 0.5 * (c + c.transpose());
    return next;
}

} // namespace damrl::inflow
