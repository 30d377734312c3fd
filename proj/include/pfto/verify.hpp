#pragma once

#include "pfto/estimator.hpp"
#include "pfto/stokes.hpp"

#include <span>
#include <vector>

namespace pfto {

/// Smooth Stokes solution on the unit square: u = curl(x^2(1-x)^2 y^2(1-y)^2), p = x^3 - 1/4.
namespace manufactured {
[[nodiscard]] Vec2 velocity(const Vec2& x);
[[nodiscard]] Eigen::Matrix2d gradient(const Vec2& x); // row c = grad u_c
[[nodiscard]] double pressure(const Vec2& x);
[[nodiscard]] Vec2 force(const Vec2& x, double mu);
} // namespace manufactured

struct ConvergenceLevel {
    int elements = 0;
    double h = 0.0;
    double energy_error = 0.0; // ||grad_T (u - u_h)||
    double l2_error = 0.0;
    double max_divergence = 0.0; // max_T |div u_h| / ||u_h||_{1,T}
    double eta2 = 0.0;
};

struct ConvergenceStudy {
    std::vector<ConvergenceLevel> levels;
    double energy_rate = 0.0;
    double l2_rate = 0.0;
    double eta2_rate = 0.0;
};

/// Least-squares slope of log(err) against log(h).
[[nodiscard]] double fit_rate(std::span<const double> h, std::span<const double> err);

/// Pure-fluid (phi = 1) solves on n0 x n0, then `levels - 1` uniform refinements.
[[nodiscard]] ConvergenceStudy manufactured_study(int n0 = 8, int levels = 4,
                                                  LinearSolverKind solver = LinearSolverKind::Direct);

} // namespace pfto
