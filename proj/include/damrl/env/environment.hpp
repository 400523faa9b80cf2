#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "damrl/common/date.hpp"
#include "damrl/common/rng.hpp"
#include "damrl/data/records.hpp"
#include "damrl/hydro/reward.hpp"
#include "damrl/hydro/sim_params.hpp"
#include "damrl/inflow/filter.hpp"

namespace damrl::env {

/// Observable state of the dam MDP.
struct EnvState {
    hydro::WaterLevel level;
    std::vector<double> rainfall_window; // K previous daily rainfalls, most recent first
    int day_index = 0;
    Date date;
    std::vector<double> level_window14; // trailing flood-window levels, oldest first
};

struct Action {
    hydro::Discharge discharge;
};

/// Result of one simulated day. For the terminal outcome next_state.day_index
/// equals max_step; such a state is never a valid step() input.
struct StepOutcome {
    EnvState next_state;
    hydro::RewardBreakdown reward;
    hydro::StorageVolume inflow{0.0};
    hydro::StorageVolume released{0.0};
    hydro::StorageVolume spilled{0.0};
    bool done = false;
    bool overflowed = false;
    double rainfall_mm = 0.0;      // realized rainfall of the simulated day
    hydro::Discharge applied{0.0}; // action after clipping to [0, a_max]
};

/// Where the simulated day's rainfall comes from. Implementations are
/// immutable; stochastic sources draw from the environment's stream.
class RainfallSource {
  public:
    virtual ~RainfallSource() = default;
    virtual double rainfall_mm(Date date, RngStream& rng) const = 0;
    /// Observed rainfall before the episode, for seeding the state window at
    /// reset; nullopt means unknown (treated as 0).
    virtual std::optional<double> historical_rainfall(Date) const { return std::nullopt; }
};

class ZeroRainfall final : public RainfallSource {
  public:
    double rainfall_mm(Date, RngStream&) const override { return 0.0; }
};

/// Replays recorded rainfall by exact date; throws when the episode runs past
/// the dataset.
class ReplayRainfall final : public RainfallSource {
  public:
    explicit ReplayRainfall(std::shared_ptr<const std::vector<data::DailyRecord>> records);
    double rainfall_mm(Date date, RngStream& rng) const override;
    std::optional<double> historical_rainfall(Date date) const override;

  private:
    std::shared_ptr<const std::vector<data::DailyRecord>> records_;
    long first_serial_ = 0;
};

/// Draws the rainfall of a uniformly chosen record with the same calendar
/// month/day (training-time variety with the right seasonality).
class BootstrapRainfall final : public RainfallSource {
  public:
    explicit BootstrapRainfall(std::shared_ptr<const std::vector<data::DailyRecord>> records);
    double rainfall_mm(Date date, RngStream& rng) const override;
    std::optional<double> historical_rainfall(Date date) const override;

  private:
    std::shared_ptr<const std::vector<data::DailyRecord>> records_;
    std::vector<std::vector<double>> by_month_day_; // index: (month-1)*31 + day-1
    long first_serial_ = 0;
};

/// Upstream inflow model f(rf', window) as seen by the simulator.
class InflowSource {
  public:
    virtual ~InflowSource() = default;
    virtual double inflow_bcm(Date date, double rf_today_mm,
                              const std::vector<double>& window_mm) const = 0;
};

/// Fitted forecasting model (GLS / DLM / GLS+DLM), frozen during simulation.
class ModelInflow final : public InflowSource {
  public:
    explicit ModelInflow(std::shared_ptr<const inflow::FittedInflowModel> model);
    double inflow_bcm(Date date, double rf_today_mm,
                      const std::vector<double>& window_mm) const override;

  private:
    std::shared_ptr<const inflow::FittedInflowModel> model_;
};

/// Replays recorded inflow by exact date (the REPLAY simulator).
class ReplayInflow final : public InflowSource {
  public:
    explicit ReplayInflow(std::shared_ptr<const std::vector<data::DailyRecord>> records);
    double inflow_bcm(Date date, double rf_today_mm,
                      const std::vector<double>& window_mm) const override;

  private:
    std::shared_ptr<const std::vector<data::DailyRecord>> records_;
    long first_serial_ = 0;
};

struct EpisodeConfig {
    hydro::SimParams params;
    hydro::WaterLevel initial_level{335.0};
    Date start_date{2018, 6, 1};
    std::shared_ptr<const InflowSource> inflow;
    std::shared_ptr<const RainfallSource> rainfall;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on missing sources, initial level outside
    /// the curve domain, or initial storage below dead storage.
    void validate() const;
};

bool is_dry_season(Date date, const hydro::SimParams& params);

/// Days since the most recent water-year start (0 on water_year_start).
int day_of_water_year(Date date, const hydro::SimParams& params);

/// Single-threaded, stateful between reset and step. Distinct instances are
/// independent.
class Environment {
  public:
    explicit Environment(EpisodeConfig config);

    /// Seeds the stream from config.seed and rebuilds the start state; two
    /// resets with the same config are identical.
    const EnvState& reset();

    /// Advances one day. Throws std::logic_error before the first reset or
    /// after the episode is done; propagates source failures; any non-finite
    /// quantity is a hard error.
    StepOutcome step(const Action& action);

    const EnvState& state() const;
    const EpisodeConfig& config() const { return config_; }

  private:
    EpisodeConfig config_;
    EnvState state_;
    RngStream rng_{0};
    bool ready_ = false;
    bool done_ = false;
};

} // namespace damrl::env
