#include "dbsim/channel.hpp"

#include <numbers>
#include <stdexcept>

namespace dbsim {

void Environment::validate() const
{
    if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("environment: a and b must be positive");
    if (mu_los_db >= mu_nlos_db)
        throw std::invalid_argument("environment: LoS mean excess loss must be below NLoS");
    if (k_los <= 0.0 || l_los <= 0.0 || k_nlos <= 0.0 || l_nlos <= 0.0)
        throw std::invalid_argument("environment: shadowing spread parameters must be positive");
    if (carrier_hz <= 0.0) throw std::invalid_argument("environment: carrier frequency must be positive");
    if (speed_of_light <= 0.0) throw std::invalid_argument("environment: speed of light must be positive");
    if (bandwidth_hz <= 0.0) throw std::invalid_argument("environment: bandwidth must be positive");
    if (mbs_shadow_sigma_db < 0.0)
        throw std::invalid_argument("environment: shadowing sigma must be non-negative");
}

BaseStation BaseStation::macro(const Vec2& xy, double mast_m, double tx_power_dbm)
{
    if (mast_m <= 0.0) throw std::invalid_argument("macro station mast height must be positive");
    return BaseStation{0, BsKind::Mbs, {xy.x, xy.y, mast_m}, tx_power_dbm, 0.0};
}

BaseStation BaseStation::drone(int id, const Vec3& pos, double tx_power_dbm, double beamwidth_deg)
{
    if (id < 1) throw std::invalid_argument("drone station ids start at 1");
    if (beamwidth_deg <= 0.0 || beamwidth_deg >= 180.0)
        throw std::invalid_argument("drone beamwidth must lie in (0, 180) degrees");
    if (pos.z <= 0.0) throw std::invalid_argument("drone altitude must be positive");
    return BaseStation{id, BsKind::Dbs, pos, tx_power_dbm, beamwidth_deg};
}

double fspl_db(double distance_m, double carrier_hz, double speed_of_light)
{
    if (distance_m <= 0.0) throw std::domain_error("fspl_db: distance must be positive");
    if (carrier_hz <= 0.0) throw std::domain_error("fspl_db: carrier frequency must be positive");
    return 20.0 *
           std::log10(4.0 * std::numbers::pi * carrier_hz * distance_m / speed_of_light);
}

double elevation_angle_deg(const Vec2& user_xy, const Vec3& dbs_pos)
{
    if (dbs_pos.z <= 0.0) throw std::domain_error("elevation_angle_deg: altitude must be positive");
    const double delta = planar_distance(user_xy, dbs_pos.xy());
    if (delta == 0.0) return 90.0;
    return (180.0 / std::numbers::pi) * std::atan(dbs_pos.z / delta);
}

double p_los(double theta_deg, const Environment& env)
{
    return 1.0 / (1.0 + env.a * std::exp(-env.b * (theta_deg - env.a)));
}

double a2g_excess_loss_db(double theta_deg, const Environment& env, ChannelMode mode, Rng* rng)
{
    const double p = p_los(theta_deg, env);
    if (mode == ChannelMode::Expected) {
        return p * env.mu_los_db + (1.0 - p) * env.mu_nlos_db;
    }
    if (rng == nullptr)
        throw std::invalid_argument("a2g_excess_loss_db: sampled mode needs a random stream");
    const bool los = rng->uniform() < p;
    const double mu = los ? env.mu_los_db : env.mu_nlos_db;
    const double k = los ? env.k_los : env.k_nlos;
    const double l = los ? env.l_los : env.l_nlos;
    const double sigma = k * std::exp(-l * theta_deg);
    return rng->normal(mu, sigma);
}

double antenna_gain(double theta_deg, double beamwidth_deg)
{
    if (beamwidth_deg <= 0.0 || beamwidth_deg >= 180.0)
        throw std::invalid_argument("antenna_gain: beamwidth must lie in (0, 180) degrees");
    const double phi = std::abs(90.0 - theta_deg);
    if (phi <= 0.5 * beamwidth_deg) return 30000.0 / (beamwidth_deg * beamwidth_deg);
    return 0.0; // side lobes treated as negligible
}

double mbs_path_loss_db(double distance_m, const Environment& env, ChannelMode mode, Rng* rng)
{
    if (distance_m <= 0.0) throw std::domain_error("mbs_path_loss_db: distance must be positive");
    double loss = 128.1 + 37.6 * std::log10(distance_m / 1000.0);
    if (mode == ChannelMode::Sampled) {
        if (rng == nullptr)
            throw std::invalid_argument("mbs_path_loss_db: sampled mode needs a random stream");
        loss += rng->normal(0.0, env.mbs_shadow_sigma_db);
    }
    return loss;
}

double footprint_threshold_deg(double beamwidth_deg)
{
    return 90.0 - 0.5 * beamwidth_deg;
}

LinkMatrix build_link_matrix(const std::vector<User>& users, const std::vector<BaseStation>& bss,
                             const Environment& env, ChannelMode mode, Rng* rng)
{
    if (users.empty()) throw std::invalid_argument("build_link_matrix: users must be nonempty");
    if (bss.empty() || bss[0].kind != BsKind::Mbs)
        throw std::invalid_argument("build_link_matrix: station 0 must be the macro station");
    for (std::size_t j = 0; j < bss.size(); ++j) {
        if (bss[j].id != static_cast<int>(j))
            throw std::invalid_argument("build_link_matrix: station ids must match positions");
        if (j > 0 && bss[j].kind != BsKind::Dbs)
            throw std::invalid_argument("build_link_matrix: exactly one macro station allowed");
    }

    const std::size_t n = users.size();
    const std::size_t m_plus_1 = bss.size();
    const std::size_t m = m_plus_1 - 1;

    LinkMatrix link;
    link.rate = Matrix(n, m_plus_1);
    link.sinr = Matrix(n, m_plus_1);
    link.elevation = Matrix(n, m);
    link.backhaul_rate.resize(m);

    const double noise_mw = env.noise_mw();

    // Linear channel gains (path loss and antenna pattern combined).
    Matrix gain(n, m_plus_1);
    for (std::size_t i = 0; i < n; ++i) {
        const User& u = users[i];
        for (std::size_t j = 0; j < m_plus_1; ++j) {
            const BaseStation& bs = bss[j];
            if (bs.kind == BsKind::Mbs) {
                const double d = distance_3d({u.pos.x, u.pos.y, 0.0}, bs.pos);
                const double pl = mbs_path_loss_db(d, env, mode, rng);
                gain(i, j) = db_to_linear(-pl);
            } else {
                const double theta = elevation_angle_deg(u.pos, bs.pos);
                link.elevation(i, j - 1) = theta;
                const double g = antenna_gain(theta, bs.beamwidth_deg);
                if (g == 0.0) {
                    gain(i, j) = 0.0; // outside the footprint: no link at all
                    continue;
                }
                const double d = distance_3d({u.pos.x, u.pos.y, 0.0}, bs.pos);
                const double pl =
                    fspl_db(d, env.carrier_hz, env.speed_of_light) +
                    a2g_excess_loss_db(theta, env, mode, rng);
                gain(i, j) = g * db_to_linear(-pl);
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m_plus_1; ++j) {
            const double signal = dbm_to_mw(bss[j].tx_power_dbm) * gain(i, j);
            double denom = noise_mw;
            if (j > 0) {
                // Drone links share the band; macro users are noise-limited.
                for (std::size_t l = 0; l < m_plus_1; ++l) {
                    if (l == j) continue;
                    if (l == 0 && env.exclude_mbs_interference) continue;
                    denom += dbm_to_mw(bss[l].tx_power_dbm) * gain(i, l);
                }
            }
            const double sinr = signal / denom;
            link.sinr(i, j) = sinr;
            link.rate(i, j) = std::log2(1.0 + sinr);
        }
    }

    for (std::size_t j = 1; j < m_plus_1; ++j) {
        const double d = distance_3d(bss[0].pos, bss[j].pos);
        const double pl = fspl_db(d, env.carrier_hz, env.speed_of_light);
        const double snr = dbm_to_mw(bss[0].tx_power_dbm) * db_to_linear(-pl) / noise_mw;
        link.backhaul_rate[j - 1] = std::log2(1.0 + snr);
    }

    return link;
}

} // namespace dbsim
