#ifndef DBSIM_CHANNEL_HPP
#define DBSIM_CHANNEL_HPP

#include <cstddef>
#include <vector>

#include "dbsim/common.hpp"
#include "dbsim/scenario.hpp"

namespace dbsim {

/// Propagation environment. Defaults are the urban parameter set: sigmoid
/// line-of-sight model (a, b), per-class mean excess loss and angle-dependent
/// shadowing spread, 2 GHz carrier, -174 dBm/Hz noise floor over 10 MHz,
/// 10 dB lognormal shadowing on the macro link.
struct Environment {
    double a = 9.61;
    double b = 0.16;
    double mu_los_db = 1.0;
    double k_los = 10.39;
    double l_los = 0.05;
    double mu_nlos_db = 20.0;
    double k_nlos = 29.6;
    double l_nlos = 0.03;
    double carrier_hz = 2.0e9;
    double speed_of_light = 299792458.0;
    double mbs_shadow_sigma_db = 10.0;
    double noise_psd_dbm_hz = -174.0;
    double bandwidth_hz = 10.0e6;
    // Drop the macro station's term from drone-user interference sums.
    bool exclude_mbs_interference = false;

    double noise_dbm() const { return noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz); }
    double noise_mw() const { return dbm_to_mw(noise_dbm()); }

    void validate() const;
};

enum class BsKind { Mbs, Dbs };

/// A base station. Station 0 is the unique macro station (omni antenna,
/// position z = mast height); stations 1..M are drones with a downward
/// directional antenna of the given half-power beamwidth.
struct BaseStation {
    int id = 0;
    BsKind kind = BsKind::Mbs;
    Vec3 pos;
    double tx_power_dbm = 46.0;
    double beamwidth_deg = 0.0; // directional antennas only

    static BaseStation macro(const Vec2& xy, double mast_m, double tx_power_dbm);
    static BaseStation drone(int id, const Vec3& pos, double tx_power_dbm, double beamwidth_deg);
};

enum class ChannelMode { Expected, Sampled };

/// Per-(user, station) link quality for one station layout.
/// Column 0 is the macro station; column j >= 1 is drone j.
struct LinkMatrix {
    Matrix rate;                      // spectral efficiency, bits/s/Hz
    Matrix sinr;                      // linear
    Matrix elevation;                 // N x M, degrees; column j-1 for drone j
    std::vector<double> backhaul_rate; // macro->drone spectral efficiency per drone

    std::size_t num_users() const { return rate.rows(); }
    std::size_t num_bs() const { return rate.cols(); }
    std::size_t num_dbs() const { return backhaul_rate.size(); }
};

/// Free-space path loss in dB at distance d.
double fspl_db(double distance_m, double carrier_hz, double speed_of_light = 299792458.0);

/// Elevation angle in degrees from a ground point to an airborne position;
/// 90 when the point lies directly underneath.
double elevation_angle_deg(const Vec2& user_xy, const Vec3& dbs_pos);

/// Probability of a line-of-sight link at the given elevation angle.
double p_los(double theta_deg, const Environment& env);

/// Excess path loss beyond free space on an air-to-ground link, in dB.
/// Expected mode returns the LoS-probability-weighted mean; Sampled mode
/// draws the LoS/NLoS class and then a Gaussian with the class's
/// angle-dependent spread.
double a2g_excess_loss_db(double theta_deg, const Environment& env, ChannelMode mode,
                          Rng* rng = nullptr);

/// Directional antenna gain (linear) toward a ground point at elevation
/// theta. Full gain 30000/beamwidth^2 inside the half-power cone
/// (boundary inclusive), zero outside.
double antenna_gain(double theta_deg, double beamwidth_deg);

/// Macro-cell path loss in dB: 128.1 + 37.6 log10(d_km), plus a lognormal
/// shadowing draw in Sampled mode.
double mbs_path_loss_db(double distance_m, const Environment& env, ChannelMode mode,
                        Rng* rng = nullptr);

/// Footprint threshold theta* = 90 - beamwidth/2: a user is inside a drone's
/// footprint exactly when its elevation angle is at least theta*.
double footprint_threshold_deg(double beamwidth_deg);

/// Builds rates, SINRs, elevation angles, and backhaul rates for every
/// user-station pair. Station 0 must be the unique macro station and station
/// ids must equal their list positions. Drone-user links see interference
/// from every other station (macro included unless configured out); macro
/// users are noise-limited. Backhaul links use free-space loss at the 3D
/// macro-to-drone distance.
LinkMatrix build_link_matrix(const std::vector<User>& users, const std::vector<BaseStation>& bss,
                             const Environment& env, ChannelMode mode, Rng* rng = nullptr);

} // namespace dbsim

#endif
