#pragma once

// Seeded Monte Carlo volumes of tubes {|stat| <= lambda}, unions of tubes
// and Laplace integrals.

#include "pcorr/graph_model.hpp"
#include "pcorr/space.hpp"

#include "json.hpp"

#include <atomic>
#include <functional>
#include <iomanip>
#include <mutex>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#ifndef PCORR_VERSION
#define PCORR_VERSION "0.0.0"
#endif

namespace pcorr {

inline constexpr const char* kVersion = PCORR_VERSION;

/// 10^x for x = 0, -0.25, ..., -6.
inline std::vector<double> default_lambda_grid() {
    std::vector<double> g;
    for (int k = 0; k <= 24; ++k) g.push_back(std::pow(10.0, -0.25 * k));
    return g;
}

struct VolumeCurve {
    std::string label;
    std::vector<double> lambda;    // descending
    std::vector<double> estimate;
    std::vector<double> std_err;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    nlohmann::json meta = nlohmann::json::object();

    std::size_t size() const { return lambda.size(); }

    /// Index of the grid point closest to lam in log scale.
    std::size_t index_of(double lam) const {
        std::size_t best = 0;
        for (std::size_t k = 1; k < lambda.size(); ++k)
            if (std::abs(std::log(lambda[k] / lam)) < std::abs(std::log(lambda[best] / lam))) best = k;
        return best;
    }

    void write_csv(std::ostream& os) const {
        os << "# pcorr " << kVersion;
        if (!label.empty()) os << " " << label;
        os << "\n";
        os << "lambda,estimate,std_err,n,seed\n";
        os << std::setprecision(17);
        for (std::size_t k = 0; k < lambda.size(); ++k)
            os << lambda[k] << "," << estimate[k] << "," << std_err[k] << "," << n << "," << seed << "\n";
    }

    nlohmann::json to_json() const {
        nlohmann::json j = meta;
        j["version"] = kVersion;
        j["label"] = label;
        j["n"] = n;
        j["seed"] = seed;
        j["lambda"] = lambda;
        j["estimate"] = estimate;
        j["std_err"] = std_err;
        return j;
    }

    static VolumeCurve read_csv(std::istream& in) {
        VolumeCurve c;
        std::string line;
        bool header = false;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            if (line[0] == '#') {
                // "# pcorr <version> <label>"
                std::istringstream hs(line.substr(1));
                std::string tag, version;
                if (hs >> tag >> version && tag == "pcorr") {
                    std::getline(hs >> std::ws, c.label);
                }
                continue;
            }
            if (!header) {
                if (line.rfind("lambda,estimate", 0) != 0) throw InputError("curve CSV: missing header");
                header = true;
                continue;
            }
            std::istringstream ls(line);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            if (cells.size() < 3) throw InputError("curve CSV line " + std::to_string(lineno) + ": too few columns");
            try {
                c.lambda.push_back(std::stod(cells[0]));
                c.estimate.push_back(std::stod(cells[1]));
                c.std_err.push_back(std::stod(cells[2]));
                if (cells.size() >= 5) {
                    c.n = std::stoull(cells[3]);
                    c.seed = std::stoull(cells[4]);
                }
            } catch (const std::logic_error&) {
                throw InputError("curve CSV line " + std::to_string(lineno) + ": bad number");
            }
        }
        if (c.lambda.empty()) throw InputError("curve CSV: no data rows");
        return c;
    }
};

struct VolumeOptions {
    std::size_t n = 1000000;
    std::uint64_t seed = 1;
    std::vector<double> grid = default_lambda_grid();
    unsigned threads = 0;  // 0: hardware concurrency
    std::size_t chunk = 1 << 16;
};

namespace detail {

inline unsigned worker_count(unsigned requested, std::size_t chunks) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned t = requested ? requested : hw;
    return static_cast<unsigned>(std::min<std::size_t>(std::max(1u, t), std::max<std::size_t>(1, chunks)));
}

/// Runs body(chunk_index, begin, end) over fixed chunks on a worker pool.
inline void for_each_chunk(std::size_t n, std::size_t chunk, unsigned threads,
                           const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    const std::size_t chunks = (n + chunk - 1) / chunk;
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t c; (c = next.fetch_add(1)) < chunks;) {
            try {
                body(c, c * chunk, std::min(n, (c + 1) * chunk));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = chunks;
            }
        }
    };
    const unsigned w = worker_count(threads, chunks);
    if (w <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < w; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

} // namespace detail

/// A per-thread evaluator writes k statistics for one point.
using MultiStat = std::function<void(std::span<const double>, double*)>;
using MultiStatFactory = std::function<MultiStat()>;

/// Curves of P(|stat_s| <= lambda) for s = 0..k-1 over one shared sample set.
inline std::vector<VolumeCurve> volume_curves(std::size_t k, const MultiStatFactory& make, const ParamSpace& space,
                                              const VolumeOptions& opt) {
    if (opt.n < 1) throw InputError("volume: n must be positive");
    if (opt.grid.empty()) throw InputError("volume: empty lambda grid");
    if (opt.chunk < 1) throw InputError("volume: chunk must be positive");
    std::vector<double> grid = opt.grid;
    for (double g : grid)
        if (!(g > 0)) throw InputError("volume: lambda values must be positive");
    std::sort(grid.begin(), grid.end(), std::greater<>());
    const std::size_t G = grid.size();
    const std::size_t chunks = (opt.n + opt.chunk - 1) / opt.chunk;
    // hist[chunk][s][T]: number of points whose stat lies below exactly T grid values.
    std::vector<std::vector<std::uint64_t>> hist(chunks, std::vector<std::uint64_t>(k * (G + 1), 0));
    detail::for_each_chunk(opt.n, opt.chunk, opt.threads, [&](std::size_t c, std::size_t b, std::size_t e) {
        Rng rng(substream_seed(opt.seed, c));
        MultiStat stat = make();
        std::vector<double> x(space.dim()), v(k);
        auto& h = hist[c];
        for (std::size_t s = b; s < e; ++s) {
            space.sample(rng, x);
            stat(x, v.data());
            for (std::size_t q = 0; q < k; ++q) {
                const double a = std::abs(v[q]);
                std::size_t T = 0;
                if (!std::isnan(a)) {
                    // grid is descending: count entries >= a
                    T = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), a, std::greater<>()) -
                                                 grid.begin());
                }
                ++h[q * (G + 1) + T];
            }
        }
    });
    std::vector<VolumeCurve> out(k);
    for (std::size_t q = 0; q < k; ++q) {
        std::vector<std::uint64_t> total(G + 1, 0);
        for (std::size_t c = 0; c < chunks; ++c)
            for (std::size_t T = 0; T <= G; ++T) total[T] += hist[c][q * (G + 1) + T];
        auto& curve = out[q];
        curve.lambda = grid;
        curve.n = opt.n;
        curve.seed = opt.seed;
        std::uint64_t below = 0;
        std::vector<std::uint64_t> count(G);
        for (std::size_t T = G; T >= 1; --T) {
            below += total[T];
            count[T - 1] = below;
        }
        for (std::size_t t = 0; t < G; ++t) {
            const double p = static_cast<double>(count[t]) / static_cast<double>(opt.n);
            curve.estimate.push_back(p);
            curve.std_err.push_back(std::sqrt(p * (1 - p) / static_cast<double>(opt.n)));
        }
    }
    return out;
}

inline VolumeCurve volume_curve(const std::function<std::function<double(std::span<const double>)>()>& make,
                                const ParamSpace& space, const VolumeOptions& opt) {
    return volume_curves(
               1,
               [&] {
                   auto f = make();
                   return MultiStat([f](std::span<const double> x, double* out) { out[0] = f(x); });
               },
               space, opt)
        .front();
}

inline VolumeCurve poly_volume(const Poly& f, const ParamSpace& space, const VolumeOptions& opt = {}) {
    if (space.dim() != f.arity()) throw InputError("volume: space dimension differs from ring arity");
    CompiledPoly cf(f);
    auto c = volume_curve([&] { return [cf](std::span<const double> x) { return cf(x.data()); }; }, space, opt);
    c.label = to_string(f);
    c.meta["poly"] = c.label;
    return c;
}

inline VolumeCurve tube_volume(const Dag& dag, const Triple& t, const ParamSpace& space, const VolumeOptions& opt = {}) {
    t.validate(dag.p());
    if (space.dim() != dag.edges().size()) throw InputError("volume: space dimension differs from the edge count");
    CompiledCorrelation cc(dag, t);
    auto c = volume_curve([&] { return [cc](std::span<const double> x) { return cc(x); }; }, space, opt);
    c.label = dag.name() + " " + t.to_string();
    c.meta["graph"] = dag.name();
    c.meta["triple"] = t.to_string();
    return c;
}

/// Per-triple tube curves plus the union curve (last entry) over one shared
/// sample set. The union uses the minimum |corr| over all d-connected triples.
inline std::vector<VolumeCurve> graph_volumes(const Dag& dag, const std::vector<Triple>& triples,
                                              const ParamSpace& space, const VolumeOptions& opt = {}) {
    if (space.dim() != dag.edges().size()) throw InputError("volume: space dimension differs from the edge count");
    for (const auto& t : triples) t.validate(dag.p());
    const auto connected = d_connected_triples(dag);
    if (connected.empty()) throw InputError("volume: graph has no d-connected triple");
    const std::size_t k = triples.size() + 1;
    auto curves = volume_curves(
        k,
        [&] {
            auto apc = std::make_shared<AllPartialCorrelations>(dag);
            return MultiStat([apc, &triples, &connected](std::span<const double> x, double* out) {
                apc->compute(x);
                for (std::size_t q = 0; q < triples.size(); ++q) out[q] = apc->corr(triples[q]);
                double m = INFINITY;
                for (const auto& t : connected) m = std::fmin(m, std::abs(apc->corr(t)));
                out[triples.size()] = m;
            });
        },
        space, opt);
    for (std::size_t q = 0; q < triples.size(); ++q) {
        curves[q].label = dag.name() + " " + triples[q].to_string();
        curves[q].meta["graph"] = dag.name();
        curves[q].meta["triple"] = triples[q].to_string();
    }
    curves.back().label = dag.name() + " union";
    curves.back().meta["graph"] = dag.name();
    curves.back().meta["triple"] = "union";
    return curves;
}

inline VolumeCurve union_volume(const Dag& dag, const ParamSpace& space, const VolumeOptions& opt = {}) {
    return graph_volumes(dag, {}, space, opt).back();
}

struct LaplacePoint {
    double N = 0;
    double estimate = 0;
    double std_err = 0;
};

/// Monte Carlo mean of exp(-N |f|) under the uniform distribution on the space.
inline std::vector<LaplacePoint> laplace_integral(const Poly& f, const ParamSpace& space, const std::vector<double>& Ns,
                                                  std::size_t n = 1000000, std::uint64_t seed = 1,
                                                  unsigned threads = 0) {
    if (space.dim() != f.arity()) throw InputError("laplace: space dimension differs from ring arity");
    if (n < 2) throw InputError("laplace: n must be at least 2");
    const std::size_t chunk = 1 << 16, chunks = (n + chunk - 1) / chunk, K = Ns.size();
    CompiledPoly cf(f);
    std::vector<std::vector<double>> sums(chunks, std::vector<double>(2 * K, 0.0));
    detail::for_each_chunk(n, chunk, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
        Rng rng(substream_seed(seed, c));
        std::vector<double> x(space.dim());
        for (std::size_t s = b; s < e; ++s) {
            space.sample(rng, x);
            const double a = std::abs(cf(x.data()));
            for (std::size_t q = 0; q < K; ++q) {
                const double v = std::exp(-Ns[q] * a);
                sums[c][2 * q] += v;
                sums[c][2 * q + 1] += v * v;
            }
        }
    });
    std::vector<LaplacePoint> out;
    for (std::size_t q = 0; q < K; ++q) {
        double s = 0, s2 = 0;
        for (std::size_t c = 0; c < chunks; ++c) {
            s += sums[c][2 * q];
            s2 += sums[c][2 * q + 1];
        }
        const double mean = s / static_cast<double>(n);
        const double var = std::max(0.0, s2 / static_cast<double>(n) - mean * mean);
        out.push_back({Ns[q], mean, std::sqrt(var / static_cast<double>(n - 1))});
    }
    return out;
}

/// Least-squares slope of ln y against ln x.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("log_log_slope: need at least two points");
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += std::log(x[k]);
        my += std::log(y[k]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = std::log(x[k]) - mx;
        sxy += dx * (std::log(y[k]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

} // namespace pcorr
