#pragma once

// Least-squares fit of V(lambda) / lambda^ell against powers of -ln(lambda).

#include "pcorr/rlct.hpp"
#include "pcorr/volume.hpp"

#include <Eigen/Dense>

namespace pcorr {

struct AsymptoticFit {
    Rational ell{1};
    unsigned m = 1;
    std::vector<double> coeffs;  // C_{m-1}, ..., C_0
    std::vector<double> coeff_std_err;  // empty when no std_err was supplied
    double residual_norm = 0.0;
    std::pair<double, double> window{1e-5, 1e-1};
    bool weighted = false;
    std::size_t points = 0;

    double leading() const { return coeffs.front(); }

    double predict(double lambda) const {
        if (!(lambda > 0) || lambda > 1) throw InputError("predict: lambda must lie in (0, 1]");
        const double L = -std::log(lambda);
        double s = 0.0;
        for (double c : coeffs) s = s * L + c;
        return std::pow(lambda, boost::rational_cast<double>(ell)) * s;
    }

    /// Leading term only: C_{m-1} lambda^ell (-ln lambda)^(m-1).
    double predict_first_order(double lambda) const {
        return leading() * std::pow(lambda, boost::rational_cast<double>(ell)) *
               std::pow(-std::log(lambda), static_cast<double>(m - 1));
    }

    nlohmann::json to_json() const {
        std::string l = std::to_string(ell.numerator());
        if (ell.denominator() != 1) l += "/" + std::to_string(ell.denominator());
        return {{"ell", l},
                {"m", m},
                {"coeffs", coeffs},
                {"coeff_std_err", coeff_std_err},
                {"residual_norm", residual_norm},
                {"window", {window.first, window.second}},
                {"weighted", weighted},
                {"points", points},
                {"version", kVersion}};
    }
};

struct FitOptions {
    double lo = 1e-5;
    double hi = 1e-1;
    bool weighted = false;  // inverse-variance weights from the binomial std_err
};

namespace detail {

inline AsymptoticFit fit_impl(const std::vector<double>& lambda, const std::vector<double>& estimate,
                              const std::vector<double>& std_err, std::size_t shared_n, const RlctPair& pair,
                              const FitOptions& opt) {
    if (pair.is_infinite()) throw InputError("fit: the RLCT pair is infinite");
    if (lambda.size() != estimate.size()) throw InputError("fit: lambda and estimate differ in length");
    const bool have_se = std_err.size() == lambda.size();
    if (opt.weighted && !have_se) throw InputError("fit: weighting needs std_err per point");
    if (!(opt.lo > 0) || !(opt.hi > opt.lo) || opt.hi > 1) throw InputError("fit: window must satisfy 0 < lo < hi <= 1");
    AsymptoticFit fit;
    fit.ell = pair.ell();
    fit.m = pair.m();
    fit.window = {opt.lo, opt.hi};
    fit.weighted = opt.weighted;
    const double ell = pair.ell_value();
    std::vector<std::size_t> rows;
    bool any_nonzero = false;
    for (std::size_t k = 0; k < lambda.size(); ++k) {
        if (estimate[k] > 0) any_nonzero = true;
        const double l = lambda[k];
        if (l < opt.lo * (1 - 1e-9) || l > opt.hi * (1 + 1e-9) || !(estimate[k] > 0)) continue;
        rows.push_back(k);
    }
    if (!any_nonzero) throw InputError("fit: all estimates are zero");
    if (rows.size() < fit.m + 2)
        throw InputError("fit: window holds " + std::to_string(rows.size()) + " usable points, need at least " +
                         std::to_string(fit.m + 2));
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size()), d = fit.m;
    Eigen::MatrixXd A(n, d);
    Eigen::VectorXd y(n), sy(n), row_scale(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const std::size_t k = rows[r];
        const double L = -std::log(lambda[k]), scale = std::pow(lambda[k], ell);
        double w = 1.0;
        if (opt.weighted) w = 1.0 / std::max(std_err[k] / scale, 1e-300);
        for (Eigen::Index c = 0; c < d; ++c) A(r, c) = w * std::pow(L, static_cast<double>(d - 1 - c));
        y[r] = w * estimate[k] / scale;
        sy[r] = have_se ? w * std_err[k] / scale : 0.0;
        row_scale[r] = w / scale;
    }
    const auto qr = A.colPivHouseholderQr();
    const Eigen::VectorXd x = qr.solve(y);
    fit.coeffs.assign(x.data(), x.data() + d);
    for (double c : fit.coeffs)
        if (!std::isfinite(c)) throw NumericalError("fit: non-finite coefficient");
    if (have_se) {
        // Rows from one sample are nested tubes: cov(V_a, V_b) = (V_min - V_a V_b) / n.
        Eigen::MatrixXd S = sy.array().square().matrix().asDiagonal();
        if (shared_n > 0) {
            for (Eigen::Index a = 0; a < n; ++a)
                for (Eigen::Index b = 0; b < n; ++b) {
                    if (a == b) continue;
                    const std::size_t i = rows[a], j = rows[b];
                    const double vi = estimate[i], vj = estimate[j];
                    const double c = (std::min(vi, vj) - vi * vj) / static_cast<double>(shared_n);
                    S(a, b) = c * row_scale[a] * row_scale[b];
                }
        }
        const Eigen::MatrixXd P = qr.solve(Eigen::MatrixXd::Identity(n, n));
        const Eigen::MatrixXd cov = P * S * P.transpose();
        for (Eigen::Index c = 0; c < d; ++c) fit.coeff_std_err.push_back(std::sqrt(std::max(cov(c, c), 0.0)));
    }
    fit.residual_norm = (A * x - y).norm();
    fit.points = rows.size();
    return fit;
}

} // namespace detail

/// Rows are treated as independent when computing coeff_std_err.
inline AsymptoticFit fit_constants(const std::vector<double>& lambda, const std::vector<double>& estimate,
                                   const std::vector<double>& std_err, const RlctPair& pair,
                                   const FitOptions& opt = {}) {
    return detail::fit_impl(lambda, estimate, std_err, 0, pair, opt);
}

inline AsymptoticFit fit_constants(const VolumeCurve& curve, const RlctPair& pair, const FitOptions& opt = {}) {
    return detail::fit_impl(curve.lambda, curve.estimate, curve.std_err, curve.n, pair, opt);
}

/// Rows (lambda, observed, predicted) inside and outside the window.
inline void write_fit_csv(std::ostream& os, const VolumeCurve& curve, const AsymptoticFit& fit) {
    os << "# pcorr " << kVersion << "\n";
    os << "lambda,observed,predicted\n" << std::setprecision(17);
    for (std::size_t k = 0; k < curve.size(); ++k)
        os << curve.lambda[k] << "," << curve.estimate[k] << "," << fit.predict(curve.lambda[k]) << "\n";
}

} // namespace pcorr
