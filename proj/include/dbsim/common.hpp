#ifndef DBSIM_COMMON_HPP
#define DBSIM_COMMON_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace dbsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec2 xy() const { return {x, y}; }
};

inline double planar_distance(const Vec2& a, const Vec2& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double distance_3d(const Vec3& a, const Vec3& b)
{
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

/// Dense row-major matrix of doubles. Sized once, indexed with (row, col).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state)
{
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Deterministic random stream. All distribution transforms are implemented
/// on top of the mt19937_64 bit stream so results do not depend on the
/// standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed)
    {
        std::uint64_t s = seed;
        const std::uint64_t a = detail::splitmix64(s);
        const std::uint64_t b = detail::splitmix64(s);
        gen_.seed(a ^ (b << 1));
    }

    /// Independent substream identified by (seed, tag). Streams for distinct
    /// tags never overlap in practice; adding streams never perturbs others.
    Rng derive(std::uint64_t tag) const
    {
        std::uint64_t s = seed_ ^ (0x5851f42d4c957f2dULL * (tag + 1));
        const std::uint64_t mixed = detail::splitmix64(s);
        return Rng(mixed);
    }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in [0, n). n must be positive.
    std::size_t uniform_index(std::size_t n)
    {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    /// Standard normal via the polar method; caches the spare deviate.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    double exponential() { return -std::log1p(-uniform()); }

    /// Poisson count via accumulated exponential interarrival times.
    int poisson(double mean)
    {
        if (mean < 0.0) throw std::invalid_argument("poisson mean must be non-negative");
        int k = 0;
        double s = exponential();
        while (s <= mean) {
            ++k;
            s += exponential();
        }
        return k;
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_ = 0;
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace dbsim

#endif
