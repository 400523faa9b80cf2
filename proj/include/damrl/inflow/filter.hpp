#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "damrl/common/date.hpp"
#include "damrl/inflow/dlm.hpp"
#include "damrl/inflow/gls.hpp"

namespace damrl::inflow {

enum class InflowModelKind { GLS, DLM, GLS_PLUS_DLM, REPLAY };

std::string to_string(InflowModelKind kind);
InflowModelKind kind_from_string(const std::string& text);

/// One-step-ahead forecast versus what actually arrived.
struct ForecastRecord {
    Date date;
    double observed = 0.0;  // BCM/day
    double predicted = 0.0; // BCM/day
    double variance = 0.0;  // forecast variance; > 0 for DLM-family records
};

struct FilterConfig {
    double dlm_discount = 0.98;
    double dlm_prior_scale = 100.0;
    /// Observation variance; estimated from the first-differenced inflow over
    /// `warmup_days` when unset.
    std::optional<double> dlm_obs_variance;
    int warmup_days = 60;
    /// Pre-fitted GLS model (required to continue GLS/GLS_PLUS_DLM on held-out
    /// data; fitted on the given series when absent).
    std::optional<GlsModel> gls;
    /// DLM state to continue from (held-out pass); fresh prior when absent.
    std::optional<DlmModel> dlm;
};

struct FilterResult {
    std::vector<ForecastRecord> records;
    std::optional<GlsModel> gls; // present for GLS and GLS_PLUS_DLM
    std::optional<DlmModel> dlm; // present for DLM and GLS_PLUS_DLM (final state)
};

/// One-step-ahead forecasting over aligned daily series. Forecasts start at
/// day k-1 (the first day with a full rainfall window). GLS predicts with
/// fixed post-fit coefficients; DLM forecasts then updates each day;
/// GLS_PLUS_DLM appends gls_predict output to the DLM design vector (length
/// k+2); REPLAY copies observations. Errors from per-step operations
/// propagate.
FilterResult filter_series(InflowModelKind kind, std::span<const Date> dates,
                           std::span<const double> rainfall_mm,
                           std::span<const double> inflow_bcm, int k, const FilterConfig& config);

/// Nash-Sutcliffe efficiency: 1 - sum((obs-pred)^2) / sum((obs-mean)^2).
/// Throws std::invalid_argument for fewer than 2 records or zero observed
/// variance.
double nse(std::span<const ForecastRecord> records);

/// CSV export, header: date,observed,predicted,variance.
std::string forecast_csv(std::span<const ForecastRecord> records);
void write_forecast_csv(std::span<const ForecastRecord> records, const std::string& path);

/// A fitted model bundle as used by the simulator and the CLI artifacts.
struct FittedInflowModel {
    InflowModelKind kind = InflowModelKind::REPLAY;
    int k = 7;
    std::optional<GlsModel> gls;
    std::optional<DlmModel> dlm;

    /// Mean one-step prediction for the simulator, floored at 0. `window`
    /// holds the rainfall history most recent first (>= k-1 entries used).
    /// Throws std::logic_error for REPLAY (the simulator replays observed
    /// inflow directly) and std::invalid_argument for short windows.
    double predict_bcm(double rf_today_mm, std::span<const double> window_mm) const;
};

/// JSON document: kind tag, k, coefficient arrays, covariance row-major,
/// scalar hyperparameters. Stable byte-for-byte for identical models.
std::string model_to_json_text(const FittedInflowModel& model);
FittedInflowModel model_from_json_text(const std::string& text);
void write_model_json(const FittedInflowModel& model, const std::string& path);
FittedInflowModel load_model_json(const std::string& path);

} // namespace damrl::inflow
