#pragma once

#include <optional>

namespace mcsim::channel {

/// Antenna location. `h` is the antenna height above ground.
struct Position {
    double x = 0.0;
    double y = 0.0;
    double h = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

/// Throws std::invalid_argument for non-finite coordinates or a negative height.
void validate(const Position& p);

struct RadioConfig {
    double carrier_freq_hz = 3.6e9;
    double bandwidth_hz = 20e6;
    double tx_power_dbm = 48.0;
    double noise_floor_dbm = -101.0;
    double subcarrier_spacing_hz = 30e3;
    int n_prb = 51;

    void validate() const;
};

/// Snapshot of one radio link.
struct LinkState {
    double distance_3d = 0.0;
    double path_loss_db = 0.0;
    double rsrp_dbm = 0.0;
    double sinr_db = 0.0;
};

/// Shortest distance for which the path-loss model is defined.
inline constexpr double kMinModelDistance = 1.0;

double distance_3d(const Position& a, const Position& b);

/// Line-of-sight UMi path loss, single-slope form:
/// PL = 32.4 + 21 log10(d3d) + 20 log10(fc / 1 GHz).
/// Throws std::domain_error when d3d < 1 m or fc is outside [0.5, 100] GHz.
double umi_path_loss(double d3d_m, double carrier_freq_hz);

/// Received power per resource element: total power is spread over 12 * n_prb subcarriers.
double rsrp(const RadioConfig& cfg, double path_loss_db);

/// Signal over the linear-domain sum of noise and (optional) interference.
double sinr(double rsrp_dbm, double noise_dbm, std::optional<double> interference_dbm = std::nullopt);

/// Full link evaluation; distances below 1 m are clamped to the model domain.
LinkState evaluate_link(const RadioConfig& cfg, const Position& tx, const Position& rx,
                        std::optional<double> interference_dbm = std::nullopt);

}  // namespace mcsim::channel
