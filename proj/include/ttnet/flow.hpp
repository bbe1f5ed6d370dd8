#pragma once

// Exact solution of the linear system inside one regular domain, where every
// gene decouples into  x' = alpha - beta x,  y' = kappa x - gamma y.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ttnet/model.hpp"

namespace ttnet {

namespace closed_form {

/// y(t) for beta != gamma, written with expm1 so that nearby rates stay accurate.
[[nodiscard]] inline double y_generic(double alpha, double beta, double gamma, double kappa, double x0, double y0,
                                      double t) {
    const double xs = alpha / beta;
    const double ys = kappa * xs / gamma;
    const double d = gamma - beta;
    // phi = (e^{-beta t} - e^{-gamma t}) / (gamma - beta)
    const double phi = std::exp(-beta * t) * (-std::expm1(-d * t)) / d;
    return y0 * std::exp(-gamma * t) + ys * (-std::expm1(-gamma * t)) + kappa * (x0 - xs) * phi;
}

/// y(t) for beta == gamma (resonant case).
[[nodiscard]] inline double y_degenerate(double alpha, double gamma, double kappa, double x0, double y0, double t) {
    const double e = std::exp(-gamma * t);
    return y0 * e + kappa * alpha / (gamma * gamma) * (-std::expm1(-gamma * t)) + kappa * (x0 - alpha / gamma) * t * e;
}

}  // namespace closed_form

/// One decoupled gene with constant production alpha.
struct GeneFlow {
    double alpha = 0.0;
    double beta = 1.0;
    double gamma = 1.0;
    double kappa = 1.0;
    bool degenerate = false;  // beta treated as equal to gamma

    [[nodiscard]] double x_rate() const noexcept { return degenerate ? gamma : beta; }
    [[nodiscard]] double x_focal() const noexcept { return alpha / x_rate(); }
    [[nodiscard]] double y_focal() const noexcept { return kappa * x_focal() / gamma; }

    [[nodiscard]] double x(double x0, double t) const {
        const double r = x_rate();
        return x0 * std::exp(-r * t) + alpha / r * (-std::expm1(-r * t));
    }

    [[nodiscard]] double y(double x0, double y0, double t) const {
        return degenerate ? closed_form::y_degenerate(alpha, gamma, kappa, x0, y0, t)
                          : closed_form::y_generic(alpha, beta, gamma, kappa, x0, y0, t);
    }

    /// y'(t) = kappa x(t) - gamma y(t).
    [[nodiscard]] double dy(double x0, double y0, double t) const { return kappa * x(x0, t) - gamma * y(x0, y0, t); }

    /// Unique t > 0 where y' = 0, if any. With u = (y0 - y*) / (kappa (x0 - x*)) and d = gamma - beta:
    ///   t_c = [log1p(d/beta) + log1p(-d u)] / d,   or  1/gamma - u  when d = 0.
    [[nodiscard]] std::optional<double> y_extremum_time(double x0, double y0) const {
        const double xs = x_focal();
        if (x0 == xs) return std::nullopt;  // y relaxes monotonically
        const double u = (y0 - y_focal()) / (kappa * (x0 - xs));
        double tc = 0.0;
        if (degenerate) {
            tc = 1.0 / gamma - u;
        } else {
            const double d = gamma - beta;
            if (!(1.0 - d * u > 0.0)) return std::nullopt;
            tc = (std::log1p(d / beta) + std::log1p(-d * u)) / d;
        }
        if (!(tc > 0.0) || !std::isfinite(tc)) return std::nullopt;
        return tc;
    }
};

[[nodiscard]] inline bool rates_degenerate(double beta, double gamma, double tol) {
    return std::abs(beta - gamma) <= tol * std::max(beta, gamma);
}

[[nodiscard]] inline GeneFlow gene_flow(const NetworkSpec& spec, const RegularDomainIndex& h, std::size_t i) {
    const auto& g = spec.genes.at(i);
    return {production_in(spec, h, i), g.beta, g.gamma, g.kappa, rates_degenerate(g.beta, g.gamma, spec.tol.degeneracy)};
}

[[nodiscard]] inline double flow_x(const NetworkSpec& spec, const RegularDomainIndex& h, std::size_t i, double x0,
                                   double t) {
    return gene_flow(spec, h, i).x(x0, t);
}

[[nodiscard]] inline double flow_y(const NetworkSpec& spec, const RegularDomainIndex& h, std::size_t i, double x0,
                                   double y0, double t) {
    return gene_flow(spec, h, i).y(x0, y0, t);
}

/// Whole-network state after time t inside domain h.
[[nodiscard]] inline State flow(const NetworkSpec& spec, const RegularDomainIndex& h, const State& s0, double t) {
    if (s0.x.size() != spec.size() || s0.y.size() != spec.size())
        throw std::invalid_argument("flow: state dimension mismatch");
    State s;
    s.x.reserve(spec.size());
    s.y.reserve(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const auto g = gene_flow(spec, h, i);
        s.x.push_back(g.x(s0.x[i], t));
        s.y.push_back(g.y(s0.x[i], s0.y[i], t));
    }
    return s;
}

[[nodiscard]] inline std::optional<double> y_extremum_time(const NetworkSpec& spec, const RegularDomainIndex& h,
                                                           std::size_t i, double x0, double y0) {
    return gene_flow(spec, h, i).y_extremum_time(x0, y0);
}

/// Jacobian of the domain flow in (x_1, y_1, x_2, y_2, ...) order; it does not depend on the domain.
[[nodiscard]] inline Eigen::MatrixXd regular_domain_jacobian(const NetworkSpec& spec) {
    const auto m = static_cast<Eigen::Index>(2 * spec.size());
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(2 * i);
        j(k, k) = -spec.genes[i].beta;
        j(k + 1, k) = spec.genes[i].kappa;
        j(k + 1, k + 1) = -spec.genes[i].gamma;
    }
    return j;
}

}  // namespace ttnet
