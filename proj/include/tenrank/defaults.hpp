#ifndef TENRANK_DEFAULTS_HPP
#define TENRANK_DEFAULTS_HPP

#include <cstdint>

namespace tenrank::defaults {

// Numerical-rank threshold: singular values above rank_tol * sigma_max * max(rows, cols)
// count toward the rank. Exact (rational) code paths ignore it.
inline constexpr double rank_tol = 1e-10;

// Scale-invariant zero test for the degree-4 invariant: |delta| <= delta_tol * ||A||_F^4.
// The same threshold drives the eigenvalue-discriminant branch in the canonical-form
// reduction (compared against ||slab||^2) so the two zero tests agree.
inline constexpr double delta_tol = 1e-10;

// Tikhonov ridge added to a numerically singular ALS Gram matrix, scaled by its trace.
inline constexpr double als_ridge = 1e-12;

// Unit-norm tolerance for stored model vectors.
inline constexpr double unit_tol = 1e-12;

// ALS stopping: relative residual change below als_tol, or als_max_iter sweeps.
inline constexpr double als_tol = 1e-10;
inline constexpr std::int64_t als_max_iter = 10000;

// Multi-start optimizers draw this many seeded restarts by default.
inline constexpr int restarts = 8;

// Slack for the "residual never increases" invariant: exact least-squares subproblems
// keep ALS monotone up to roundoff proportional to the data norm.
inline constexpr double monotone_slack = 1e-12;

}  // namespace tenrank::defaults

#endif  // TENRANK_DEFAULTS_HPP
