#pragma once

// Parameter spaces (a box times optional balls) and seeded sampling.

#include "pcorr/error.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace pcorr {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the k-th independent substream of `seed`.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k) {
    return splitmix64(splitmix64(seed) ^ splitmix64(k + 0x632be59bd9b4e019ULL));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal by the polar Box-Muller method.
    double normal() {
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
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct BallBlock {
    std::vector<std::size_t> vars;
    double radius = 1.0;
};

/// Product of intervals over the cube coordinates and Euclidean balls over
/// designated coordinate blocks.
class ParamSpace {
  public:
    ParamSpace() = default;

    static ParamSpace cube(std::size_t dim, double lo = -1.0, double hi = 1.0) {
        ParamSpace s;
        s.lo_.assign(dim, lo);
        s.hi_.assign(dim, hi);
        s.block_of_.assign(dim, -1);
        if (!(hi > lo)) throw InputError("empty interval");
        return s;
    }

    std::size_t dim() const { return lo_.size(); }

    void set_bounds(std::size_t var, double lo, double hi) {
        if (var >= dim()) throw InputError("set_bounds: variable out of range");
        if (!(hi > lo)) throw InputError("set_bounds: empty interval");
        if (block_of_[var] >= 0) throw InputError("set_bounds: variable belongs to a ball block");
        lo_[var] = lo;
        hi_[var] = hi;
    }

    void add_ball(std::vector<std::size_t> vars, double radius) {
        if (!(radius > 0)) throw InputError("ball radius must be positive");
        if (vars.empty()) throw InputError("empty ball block");
        for (std::size_t v : vars) {
            if (v >= dim()) throw InputError("ball variable out of range");
            if (block_of_[v] >= 0) throw InputError("ball blocks must be disjoint");
            block_of_[v] = static_cast<int>(balls_.size());
            lo_[v] = -radius;
            hi_[v] = radius;
        }
        balls_.push_back({std::move(vars), radius});
    }

    const std::vector<BallBlock>& balls() const { return balls_; }
    bool in_ball(std::size_t var) const { return block_of_[var] >= 0; }

    /// Coordinate bounds; for ball coordinates the bounding interval.
    double lo(std::size_t var) const { return lo_[var]; }
    double hi(std::size_t var) const { return hi_[var]; }
    const std::vector<double>& lower() const { return lo_; }
    const std::vector<double>& upper() const { return hi_; }

    void sample(Rng& rng, std::span<double> out) const {
        for (std::size_t v = 0; v < dim(); ++v)
            if (block_of_[v] < 0) out[v] = rng.uniform(lo_[v], hi_[v]);
        for (const auto& b : balls_) {
            double norm2 = 0.0;
            for (std::size_t v : b.vars) {
                out[v] = rng.normal();
                norm2 += out[v] * out[v];
            }
            const double r = b.radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(b.vars.size()));
            const double scale = r / std::sqrt(norm2);
            for (std::size_t v : b.vars) out[v] *= scale;
        }
    }

    bool contains(std::span<const double> x, double slack = 0.0) const {
        for (std::size_t v = 0; v < dim(); ++v)
            if (block_of_[v] < 0 && (x[v] < lo_[v] - slack || x[v] > hi_[v] + slack)) return false;
        for (const auto& b : balls_) {
            double n2 = 0.0;
            for (std::size_t v : b.vars) n2 += x[v] * x[v];
            if (std::sqrt(n2) > b.radius + slack) return false;
        }
        return true;
    }

    /// Nearest point of the space (coordinate clamp, radial shrink).
    void project(std::span<double> x) const {
        for (std::size_t v = 0; v < dim(); ++v)
            if (block_of_[v] < 0) x[v] = std::min(hi_[v], std::max(lo_[v], x[v]));
        for (const auto& b : balls_) {
            double n2 = 0.0;
            for (std::size_t v : b.vars) n2 += x[v] * x[v];
            const double n = std::sqrt(n2);
            if (n > b.radius)
                for (std::size_t v : b.vars) x[v] *= b.radius / n;
        }
    }

    /// Lebesgue measure of the space.
    double measure() const {
        double m = 1.0;
        for (std::size_t v = 0; v < dim(); ++v)
            if (block_of_[v] < 0) m *= hi_[v] - lo_[v];
        for (const auto& b : balls_) m *= unit_ball_volume(b.vars.size()) * std::pow(b.radius, b.vars.size());
        return m;
    }

    static double unit_ball_volume(std::size_t d) {
        const double h = static_cast<double>(d) / 2.0;
        return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
    }

  private:
    std::vector<double> lo_, hi_;
    std::vector<int> block_of_;
    std::vector<BallBlock> balls_;
};

} // namespace pcorr
