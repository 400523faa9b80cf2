#include "damrl/inflow/filter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace damrl::inflow {

std::string to_string(InflowModelKind kind) {
    switch (kind) {
        case InflowModelKind::GLS: return "gls";
        case InflowModelKind::DLM: return "dlm";
        case InflowModelKind::GLS_PLUS_DLM: return "gls_plus_dlm";
        case InflowModelKind::REPLAY: return "replay";
    }
    throw std::logic_error("unknown inflow model kind");
}

InflowModelKind kind_from_string(const std::string& text) {
    if (text == "gls") return InflowModelKind::GLS;
    if (text == "dlm") return InflowModelKind::DLM;
    if (text == "gls_plus_dlm") return InflowModelKind::GLS_PLUS_DLM;
    if (text == "replay") return InflowModelKind::REPLAY;
    throw std::invalid_argument("unknown inflow model kind '" + text + "'");
}

namespace {

double estimate_obs_variance(std::span<const double> inflow, int warmup_days) {
    const std::size_t m = std::min<std::size_t>(inflow.size(),
                                                static_cast<std::size_t>(std::max(2, warmup_days)));
    std::vector<double> diffs;
    diffs.reserve(m);
    for (std::size_t i = 1; i < m; ++i) diffs.push_back(inflow[i] - inflow[i - 1]);
    if (diffs.empty()) return 1e-12;
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(diffs.size());
    double ss = 0.0;
    for (double d : diffs) ss += (d - mean) * (d - mean);
    const double denom = diffs.size() > 1 ? static_cast<double>(diffs.size() - 1) : 1.0;
    return std::max(ss / denom, 1e-12);
}

DesignVector window_design(std::span<const double> rainfall, std::size_t t, int k) {
    // Row for day t: today's rainfall plus the k-1 preceding days.
    std::vector<double> lags;
    lags.reserve(static_cast<std::size_t>(k - 1));
    for (int j = 1; j < k; ++j) lags.push_back(rainfall[t - static_cast<std::size_t>(j)]);
    return design_vector(rainfall[t], lags);
}

} // namespace

FilterResult filter_series(InflowModelKind kind, std::span<const Date> dates,
                           std::span<const double> rainfall_mm,
                           std::span<const double> inflow_bcm, int k, const FilterConfig& config) {
    if (k < 1) throw std::invalid_argument("filter_series: k must be >= 1");
    if (dates.size() != rainfall_mm.size() || dates.size() != inflow_bcm.size()) {
        throw std::invalid_argument("filter_series: series are not aligned");
    }
    const std::size_t n = dates.size();
    if (n < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("filter_series: series shorter than the rainfall window");
    }

    FilterResult result;
    const std::size_t first = static_cast<std::size_t>(k - 1);
    result.records.reserve(n - first);

    switch (kind) {
        case InflowModelKind::REPLAY: {
            for (std::size_t t = first; t < n; ++t) {
                result.records.push_back({dates[t], inflow_bcm[t], inflow_bcm[t], 0.0});
            }
            return result;
        }
        case InflowModelKind::GLS: {
            GlsModel model = config.gls ? *config.gls : fit_gls(rainfall_mm, inflow_bcm, k);
            const double resid_var =
                model.sigma2 / std::max(1e-12, 1.0 - model.rho * model.rho);
            for (std::size_t t = first; t < n; ++t) {
                const auto x = window_design(rainfall_mm, t, k);
                result.records.push_back({dates[t], inflow_bcm[t], gls_predict(model, x), resid_var});
            }
            result.gls = std::move(model);
            return result;
        }
        case InflowModelKind::DLM:
        case InflowModelKind::GLS_PLUS_DLM: {
            std::optional<GlsModel> gls_model;
            if (kind == InflowModelKind::GLS_PLUS_DLM) {
                gls_model = config.gls ? *config.gls : fit_gls(rainfall_mm, inflow_bcm, k);
            }
            const int dim = k + 1 + (gls_model ? 1 : 0);
            DlmModel model;
            if (config.dlm) {
                if (config.dlm->mean.size() != dim) {
                    throw std::invalid_argument("filter_series: supplied DLM state has dim " +
                                                std::to_string(config.dlm->mean.size()) +
                                                ", expected " + std::to_string(dim));
                }
                model = *config.dlm;
            } else {
                const double v = config.dlm_obs_variance
                                     ? *config.dlm_obs_variance
                                     : estimate_obs_variance(inflow_bcm, config.warmup_days);
                model = dlm_init(dim, {}, config.dlm_prior_scale, v, config.dlm_discount);
            }
            for (std::size_t t = first; t < n; ++t) {
                auto x = window_design(rainfall_mm, t, k);
                if (gls_model) x.push_back(gls_predict(*gls_model, window_design(rainfall_mm, t, k)));
                const DlmForecast f = dlm_forecast(model, x);
                result.records.push_back(
                    {dates[t], inflow_bcm[t], std::max(0.0, f.mean), f.variance});
                model = dlm_update(model, x, inflow_bcm[t]);
            }
            result.gls = std::move(gls_model);
            result.dlm = std::move(model);
            return result;
        }
    }
    throw std::logic_error("filter_series: unknown kind");
}

double nse(std::span<const ForecastRecord> records) {
    if (records.size() < 2) {
        throw std::invalid_argument("nse: need at least 2 records, got " +
                                    std::to_string(records.size()));
    }
    double mean = 0.0;
    for (const auto& r : records) mean += r.observed;
    mean /= static_cast<double>(records.size());
    double ss_err = 0.0, ss_tot = 0.0;
    for (const auto& r : records) {
        ss_err += (r.observed - r.predicted) * (r.observed - r.predicted);
        ss_tot += (r.observed - mean) * (r.observed - mean);
    }
    if (ss_tot <= 0.0) {
        throw std::invalid_argument("nse: observed series has zero variance, NSE undefined");
    }
    return 1.0 - ss_err / ss_tot;
}

std::string forecast_csv(std::span<const ForecastRecord> records) {
    std::string out = "date,observed,predicted,variance\n";
    char buf[128];
    for (const auto& r : records) {
        out += r.date.to_string();
        std::snprintf(buf, sizeof buf, ",%.9g,%.9g,%.9g\n", r.observed, r.predicted, r.variance);
        out += buf;
    }
    return out;
}

void write_forecast_csv(std::span<const ForecastRecord> records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write forecast file: " + path);
    out << forecast_csv(records);
    if (!out) throw std::runtime_error("write failed: " + path);
}

double FittedInflowModel::predict_bcm(double rf_today_mm, std::span<const double> window_mm) const {
    if (kind == InflowModelKind::REPLAY) {
        throw std::logic_error("replay models have no predictive equation; replay observed inflow");
    }
    if (window_mm.size() < static_cast<std::size_t>(k - 1)) {
        throw std::invalid_argument("predict_bcm: rainfall window shorter than k-1");
    }
    auto x = design_vector(rf_today_mm, window_mm.subspan(0, static_cast<std::size_t>(k - 1)));
    switch (kind) {
        case InflowModelKind::GLS:
            return gls_predict(*gls, x);
        case InflowModelKind::DLM:
            return std::max(0.0, dlm_forecast(*dlm, x).mean);
        case InflowModelKind::GLS_PLUS_DLM: {
            x.push_back(gls_predict(*gls, design_vector(rf_today_mm,
                                                        window_mm.subspan(0, static_cast<std::size_t>(k - 1)))));
            return std::max(0.0, dlm_forecast(*dlm, x).mean);
        }
        case InflowModelKind::REPLAY: break;
    }
    throw std::logic_error("predict_bcm: unknown kind");
}

namespace {

/// A model bundle must carry the blocks its kind predicts with.
void require_model_blocks(const FittedInflowModel& model) {
    const bool needs_gls =
        model.kind == InflowModelKind::GLS || model.kind == InflowModelKind::GLS_PLUS_DLM;
    const bool needs_dlm =
        model.kind == InflowModelKind::DLM || model.kind == InflowModelKind::GLS_PLUS_DLM;
    if (needs_gls && !model.gls) {
        throw std::invalid_argument("model json: " + to_string(model.kind) +
                                    " requires a gls block");
    }
    if (needs_dlm && !model.dlm) {
        throw std::invalid_argument("model json: " + to_string(model.kind) +
                                    " requires a dlm block");
    }
}

} // namespace

std::string model_to_json_text(const FittedInflowModel& model) {
    require_model_blocks(model);
    nlohmann::json doc;
    doc["version"] = 1;
    doc["kind"] = to_string(model.kind);
    doc["k"] = model.k;
    if (model.gls) {
        doc["gls"] = {{"coefficients", model.gls->coefficients},
                      {"rho", model.gls->rho},
                      {"sigma2", model.gls->sigma2}};
    }
    if (model.dlm) {
        const auto& d = *model.dlm;
        std::vector<double> mean(d.mean.data(), d.mean.data() + d.mean.size());
        std::vector<double> cov;
        cov.reserve(static_cast<std::size_t>(d.covariance.size()));
        for (Eigen::Index i = 0; i < d.covariance.rows(); ++i) {
            for (Eigen::Index j = 0; j < d.covariance.cols(); ++j) cov.push_back(d.covariance(i, j));
        }
        doc["dlm"] = {{"mean", mean},
                      {"covariance", cov},
                      {"obs_variance", d.obs_variance},
                      {"discount", d.discount}};
    }
    return doc.dump(2) + "\n";
}

FittedInflowModel model_from_json_text(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    FittedInflowModel model;
    model.kind = kind_from_string(doc.at("kind").get<std::string>());
    model.k = doc.at("k").get<int>();
    if (model.k < 1) throw std::invalid_argument("model json: k must be >= 1");
    if (doc.contains("gls")) {
        GlsModel g;
        g.coefficients = doc["gls"].at("coefficients").get<std::vector<double>>();
        g.rho = doc["gls"].at("rho").get<double>();
        g.sigma2 = doc["gls"].at("sigma2").get<double>();
        model.gls = std::move(g);
    }
    if (doc.contains("dlm")) {
        const auto mean = doc["dlm"].at("mean").get<std::vector<double>>();
        const auto cov = doc["dlm"].at("covariance").get<std::vector<double>>();
        const auto dim = static_cast<Eigen::Index>(mean.size());
        if (cov.size() != mean.size() * mean.size()) {
            throw std::invalid_argument("model json: covariance is not dim*dim");
        }
        DlmModel d;
        d.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), dim);
        d.covariance.resize(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                d.covariance(i, j) = cov[static_cast<std::size_t>(i * dim + j)];
            }
        }
        d.obs_variance = doc["dlm"].at("obs_variance").get<double>();
        d.discount = doc["dlm"].at("discount").get<double>();
        model.dlm = std::move(d);
    }
    require_model_blocks(model);
    return model;
}

void write_model_json(const FittedInflowModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << model_to_json_text(model);
    if (!out) throw std::runtime_error("write failed: " + path);
}

FittedInflowModel load_model_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json_text(buf.str());
}

} // namespace damrl::inflow
