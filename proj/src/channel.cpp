#include "mcsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcsim::channel {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

void validate(const Position& p)
{
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.h)) {
        throw std::invalid_argument("position coordinates must be finite");
    }
    if (p.h < 0.0) {
        throw std::invalid_argument("antenna height must be >= 0");
    }
}

void RadioConfig::validate() const
{
    if (!(carrier_freq_hz > 0.0)) {
        throw std::invalid_argument("carrier frequency must be > 0");
    }
    if (!(bandwidth_hz > 0.0)) {
        throw std::invalid_argument("bandwidth must be > 0");
    }
    if (n_prb < 1) {
        throw std::invalid_argument("n_prb must be >= 1");
    }
    const bool scs_ok = subcarrier_spacing_hz == 15e3 || subcarrier_spacing_hz == 30e3 ||
                        subcarrier_spacing_hz == 60e3 || subcarrier_spacing_hz == 120e3;
    if (!scs_ok) {
        throw std::invalid_argument("subcarrier spacing must be one of 15, 30, 60, 120 kHz");
    }
    if (!std::isfinite(tx_power_dbm) || !std::isfinite(noise_floor_dbm)) {
        throw std::invalid_argument("tx power and noise floor must be finite");
    }
}

double distance_3d(const Position& a, const Position& b)
{
    return std::hypot(a.x - b.x, a.y - b.y, a.h - b.h);
}

double umi_path_loss(double d3d_m, double carrier_freq_hz)
{
    if (!(d3d_m >= kMinModelDistance)) {
        throw std::domain_error("UMi path loss requires d3d >= 1 m");
    }
    const double fc_ghz = carrier_freq_hz / 1e9;
    if (!(fc_ghz >= 0.5 && fc_ghz <= 100.0)) {
        throw std::domain_error("UMi path loss requires 0.5 GHz <= fc <= 100 GHz");
    }
    return 32.4 + 21.0 * std::log10(d3d_m) + 20.0 * std::log10(fc_ghz);
}

double rsrp(const RadioConfig& cfg, double path_loss_db)
{
    const double subcarriers = 12.0 * static_cast<double>(cfg.n_prb);
    return cfg.tx_power_dbm - 10.0 * std::log10(subcarriers) - path_loss_db;
}

double sinr(double rsrp_dbm, double noise_dbm, std::optional<double> interference_dbm)
{
    if (!interference_dbm) {
        return rsrp_dbm - noise_dbm;
    }
    // 10^(-inf/10) == 0, so an interferer at -inf dBm reduces to the noise-only case.
    const double denom_mw = db_to_linear(noise_dbm) + db_to_linear(*interference_dbm);
    return rsrp_dbm - 10.0 * std::log10(denom_mw);
}

LinkState evaluate_link(const RadioConfig& cfg, const Position& tx, const Position& rx,
                        std::optional<double> interference_dbm)
{
    LinkState link;
    link.distance_3d = distance_3d(tx, rx);
    const double model_distance = std::max(link.distance_3d, kMinModelDistance);
    link.path_loss_db = umi_path_loss(model_distance, cfg.carrier_freq_hz);
    link.rsrp_dbm = rsrp(cfg, link.path_loss_db);
    link.sinr_db = sinr(link.rsrp_dbm, cfg.noise_floor_dbm, interference_dbm);
    return link;
}

}  // namespace mcsim::channel
