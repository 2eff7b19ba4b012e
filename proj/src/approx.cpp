#include "tenrank/approx.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "tenrank/constructions.hpp"

namespace tenrank {

std::vector<CpTerm<double>> CpModel::terms() const {
  std::vector<CpTerm<double>> out;
  out.reserve(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) out.push_back({lambda[i], vectors[i]});
  return out;
}

DenseTensor<double> CpModel::evaluate() const { return evaluate_cp(terms(), shape); }

DenseTensor<double> BoundaryModel::evaluate() const {
  std::vector<CpTerm<double>> terms;
  if (family == BoundaryFamily::two_term) {
    terms = {{1.0, {x[0], x[1], x[2]}}, {1.0, {y[0], y[1], y[2]}}};
  } else {
    terms = {{1.0, {x[0], x[1], y[2]}},
             {1.0, {x[0], y[1], x[2]}},
             {1.0, {y[0], x[1], x[2]}}};
  }
  return evaluate_cp(terms, shape);
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Uniform draw in (0,1] from the top 53 bits of the engine. Standard-library
// distributions are implementation-defined, so seeded runs would not reproduce
// across platforms; building from raw bits keeps them bit-stable.
double uniform01(std::mt19937_64& engine) {
  return static_cast<double>((engine() >> 11) + 1) * 0x1.0p-53;
}

// Box-Muller transform; uniform01 excludes 0 so the log is always finite.
double standard_normal(std::mt19937_64& engine) {
  double u1 = uniform01(engine);
  double u2 = uniform01(engine);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Solves G X = RHS for a symmetric positive semidefinite Gram matrix G.
// Near-singular systems get a trace-scaled Tikhonov ridge so the iteration
// stays defined when factors become collinear, which is exactly the regime
// degenerate inputs drive ALS into.
Eigen::MatrixXd ridge_solve(Eigen::MatrixXd g, const Eigen::MatrixXd& rhs) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  double s_max = svd.singularValues()(0);
  double s_min = svd.singularValues()(svd.singularValues().size() - 1);
  if (s_min <= defaults::als_ridge * s_max) {
    double trace = g.trace();
    double ridge = trace > 0 ? defaults::als_ridge * trace / static_cast<double>(g.rows())
                             : defaults::als_ridge;
    g.diagonal().array() += ridge;
  }
  return g.ldlt().solve(rhs);
}

// Largest absolute pairwise cosine between the (unit) columns of one factor
// matrix; 0 by convention when there is only one column.
double max_pair_cosine(const Eigen::MatrixXd& u) {
  double best = 0;
  for (Eigen::Index c = 0; c + 1 < u.cols(); ++c)
    for (Eigen::Index d = c + 1; d < u.cols(); ++d) {
      double nc = u.col(c).norm();
      double nd = u.col(d).norm();
      if (nc == 0 || nd == 0) continue;
      best = std::max(best, std::abs(u.col(c).dot(u.col(d))) / (nc * nd));
    }
  return best;
}

DenseTensor<double> reconstruct_cp(const Shape& shape, const std::vector<double>& lambda,
                                   const std::vector<Eigen::MatrixXd>& factors) {
  DenseTensor<double> out(shape);
  std::vector<Index> idx(shape.size(), 0);
  Index off = 0;
  do {
    double value = 0;
    for (std::size_t c = 0; c < lambda.size(); ++c) {
      double term = lambda[c];
      for (std::size_t m = 0; m < factors.size(); ++m)
        term *= factors[m](idx[m], static_cast<Eigen::Index>(c));
      value += term;
    }
    out.data()[static_cast<std::size_t>(off++)] = value;
  } while (next_index(idx, shape));
  return out;
}

}  // namespace

AlsResult als_cp(const DenseTensor<double>& a, Index rank, std::uint64_t seed,
                 long max_iter, double tol) {
  if (rank < 1) throw std::invalid_argument("als_cp: rank must be at least 1");
  if (max_iter < 1) throw std::invalid_argument("als_cp: max_iter must be at least 1");
  const Shape& shape = a.shape();
  const int order = a.order();
  const auto r = static_cast<Eigen::Index>(rank);
  const double a_norm = frobenius_norm(a);

  Clock::time_point start = Clock::now();
  std::mt19937_64 engine(seed);

  // Unit-column factors plus a separate coefficient vector. Only the factor
  // block currently being solved for is allowed to carry scale, and its column
  // norms become the new coefficients once it is re-normalized.
  std::vector<Eigen::MatrixXd> factors;
  factors.reserve(static_cast<std::size_t>(order));
  for (int m = 0; m < order; ++m) {
    Eigen::MatrixXd u(shape[static_cast<std::size_t>(m)], r);
    for (Eigen::Index i = 0; i < u.rows(); ++i)
      for (Eigen::Index c = 0; c < u.cols(); ++c) u(i, c) = standard_normal(engine);
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      double n = u.col(c).norm();
      if (n > 0) u.col(c) /= n;
      else u.col(c).setUnit(c % u.rows());
    }
    factors.push_back(std::move(u));
  }
  std::vector<double> lambda(static_cast<std::size_t>(rank), 1.0);

  FitTrace trace;
  double prev_residual = 0;
  for (long iter = 1; iter <= max_iter; ++iter) {
    for (int m = 0; m < order; ++m) {
      // Normal equations for mode m: the Gram matrix is the Hadamard product
      // of the other modes' Grams, and the right-hand side is the matricized
      // tensor times the Khatri-Rao product, accumulated entry by entry.
      Eigen::MatrixXd gram = Eigen::MatrixXd::Ones(r, r);
      for (int j = 0; j < order; ++j) {
        if (j == m) continue;
        gram = gram.cwiseProduct(factors[static_cast<std::size_t>(j)].transpose() *
                                 factors[static_cast<std::size_t>(j)]);
      }
      Eigen::MatrixXd w = Eigen::MatrixXd::Zero(shape[static_cast<std::size_t>(m)], r);
      std::vector<Index> idx(static_cast<std::size_t>(order), 0);
      Index off = 0;
      do {
        double value = a.data()[static_cast<std::size_t>(off++)];
        if (value != 0) {
          for (Eigen::Index c = 0; c < r; ++c) {
            double prod = value;
            for (int j = 0; j < order; ++j)
              if (j != m) prod *= factors[static_cast<std::size_t>(j)](idx[static_cast<std::size_t>(j)], c);
            w(idx[static_cast<std::size_t>(m)], c) += prod;
          }
        }
      } while (next_index(idx, shape));

      Eigen::MatrixXd solved = ridge_solve(gram, w.transpose()).transpose();
      // Re-normalize the freshly solved block; zero columns keep their old
      // direction so the model stays well-formed with a zero coefficient.
      for (Eigen::Index c = 0; c < r; ++c) {
        double n = solved.col(c).norm();
        lambda[static_cast<std::size_t>(c)] = n;
        if (n > 0) factors[static_cast<std::size_t>(m)].col(c) = solved.col(c) / n;
      }
    }

    double residual = frobenius_norm(a - reconstruct_cp(shape, lambda, factors));
    FitTraceRow row;
    row.iter = iter;
    row.residual = residual;
    row.lambdas = lambda;
    for (const Eigen::MatrixXd& u : factors)
      row.max_cos.push_back(rank == 1 ? 0.0 : max_pair_cosine(u));
    row.elapsed_ms = elapsed_ms_since(start);
    trace.rows.push_back(std::move(row));

    if (iter > 1 && tol > 0 && std::abs(prev_residual - residual) <= tol * a_norm) break;
    prev_residual = residual;
  }

  // Package the model with coefficients sorted descending; ties keep the
  // original term order so runs stay deterministic.
  std::vector<std::size_t> perm(lambda.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t i, std::size_t j) { return lambda[i] > lambda[j]; });
  CpModel model;
  model.shape = shape;
  for (std::size_t t : perm) {
    model.lambda.push_back(lambda[t]);
    std::vector<Vec<double>> per_mode;
    for (int m = 0; m < order; ++m) {
      const Eigen::MatrixXd& u = factors[static_cast<std::size_t>(m)];
      Vec<double> v(static_cast<std::size_t>(u.rows()));
      for (Eigen::Index i = 0; i < u.rows(); ++i)
        v[static_cast<std::size_t>(i)] = u(i, static_cast<Eigen::Index>(t));
      per_mode.push_back(std::move(v));
    }
    model.vectors.push_back(std::move(per_mode));
  }
  return {std::move(model), std::move(trace)};
}

AlsResult best_rank1(const DenseTensor<double>& a, std::uint64_t seed, int restarts,
                     long max_iter, double tol) {
  if (restarts < 1) throw std::invalid_argument("best_rank1: restarts must be at least 1");
  AlsResult best;
  bool have = false;
  for (int j = 0; j < restarts; ++j) {
    AlsResult run = als_cp(a, 1, seed + static_cast<std::uint64_t>(j), max_iter, tol);
    // Strict comparison makes the earliest seed win ties, so the reduction is
    // order-independent when restarts execute out of order.
    if (!have || run.trace.back().residual < best.trace.back().residual) {
      best = std::move(run);
      have = true;
    }
  }
  return best;
}

namespace {

// State of the three-term boundary optimizer: the six vectors of
// x1⊗x2⊗y3 + x1⊗y2⊗x3 + y1⊗x2⊗x3, updated one mode at a time. Within mode m
// the model is linear in the pair (x_m, y_m), so each update is an exact
// least-squares solve against two fixed companion tensors.
struct ThreeTermState {
  std::array<Vec<double>, 3> x;
  std::array<Vec<double>, 3> y;
};

Vec<double> random_vec(Index dim, std::mt19937_64& engine) {
  Vec<double> v(static_cast<std::size_t>(dim));
  for (double& e : v) e = standard_normal(engine);
  return v;
}

// Outer product of two vectors flattened row-major, plus an accumulating
// variant; these are the order-2 companions the block solves contract against.
void accumulate_outer(Vec<double>& flat, const Vec<double>& u, const Vec<double>& v) {
  std::size_t cols = v.size();
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) flat[i * cols + j] += u[i] * v[j];
}

double dot(const Vec<double>& u, const Vec<double>& v) {
  double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double norm2(const Vec<double>& u) { return std::sqrt(dot(u, u)); }

// One exact least-squares update of the pair (primary, secondary) for mode m,
// where the model restricted to that mode reads primary⊗C1 + secondary⊗C2 and
// C1, C2 are the companions built from the other two modes. Every mode-m slice
// of A projects onto span{C1, C2} through one shared 2x2 Gram system.
void update_pair(const DenseTensor<double>& a, int mode, const Vec<double>& c1,
                 const Vec<double>& c2, Vec<double>& primary, Vec<double>& secondary) {
  const Shape& shape = a.shape();
  Index dim = shape[static_cast<std::size_t>(mode)];
  Eigen::MatrixXd gram(2, 2);
  gram(0, 0) = dot(c1, c1);
  gram(0, 1) = dot(c1, c2);
  gram(1, 0) = gram(0, 1);
  gram(1, 1) = dot(c2, c2);

  // rhs(i, :) = ⟨A slice i, C1⟩, ⟨A slice i, C2⟩, walking A once. The slice for
  // index i of the chosen mode is the order-2 array over the remaining modes in
  // ascending order, matching how the companions were built.
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(dim, 2);
  std::vector<Index> idx(3, 0);
  Index off = 0;
  int other_a = mode == 0 ? 1 : 0;
  int other_b = mode == 2 ? 1 : 2;
  Index cols = shape[static_cast<std::size_t>(other_b)];
  do {
    double value = a.data()[static_cast<std::size_t>(off++)];
    if (value != 0) {
      std::size_t flat = static_cast<std::size_t>(idx[static_cast<std::size_t>(other_a)] * cols +
                                                  idx[static_cast<std::size_t>(other_b)]);
      rhs(idx[static_cast<std::size_t>(mode)], 0) += value * c1[flat];
      rhs(idx[static_cast<std::size_t>(mode)], 1) += value * c2[flat];
    }
  } while (next_index(idx, shape));

  Eigen::MatrixXd solved = ridge_solve(gram, rhs.transpose()).transpose();
  for (Index i = 0; i < dim; ++i) {
    primary[static_cast<std::size_t>(i)] = solved(i, 0);
    secondary[static_cast<std::size_t>(i)] = solved(i, 1);
  }
}

BoundaryModel three_term_model(const Shape& shape, const ThreeTermState& s) {
  BoundaryModel model;
  model.family = BoundaryFamily::three_term_boundary;
  model.shape = shape;
  model.x = s.x;
  model.y = s.y;
  return model;
}

WeakRank2Result fit_three_term_once(const DenseTensor<double>& a, std::uint64_t seed,
                                    long max_iter, double tol) {
  const Shape& shape = a.shape();
  const double a_norm = frobenius_norm(a);
  Clock::time_point start = Clock::now();
  std::mt19937_64 engine(seed);

  ThreeTermState s;
  for (int m = 0; m < 3; ++m) {
    s.x[static_cast<std::size_t>(m)] = random_vec(shape[static_cast<std::size_t>(m)], engine);
    s.y[static_cast<std::size_t>(m)] = random_vec(shape[static_cast<std::size_t>(m)], engine);
  }

  FitTrace trace;
  double prev_residual = 0;
  for (long iter = 1; iter <= max_iter; ++iter) {
    for (int m = 0; m < 3; ++m) {
      // Companions for the pair (x_m, y_m). With terms x1⊗x2⊗y3, x1⊗y2⊗x3,
      // y1⊗x2⊗x3: x_m multiplies the two terms it appears in, y_m the third.
      std::size_t ia = m == 0 ? 1 : 0;
      std::size_t ib = m == 2 ? 1 : 2;
      std::size_t rows = s.x[ia].size();
      std::size_t cols = s.x[ib].size();
      Vec<double> c1(rows * cols, 0.0);
      Vec<double> c2(rows * cols, 0.0);
      if (m == 0) {
        accumulate_outer(c1, s.x[1], s.y[2]);
        accumulate_outer(c1, s.y[1], s.x[2]);
        accumulate_outer(c2, s.x[1], s.x[2]);
      } else if (m == 1) {
        accumulate_outer(c1, s.x[0], s.y[2]);
        accumulate_outer(c1, s.y[0], s.x[2]);
        accumulate_outer(c2, s.x[0], s.x[2]);
      } else {
        accumulate_outer(c1, s.x[0], s.y[1]);
        accumulate_outer(c1, s.y[0], s.x[1]);
        accumulate_outer(c2, s.x[0], s.x[1]);
      }
      update_pair(a, m, c1, c2, s.x[static_cast<std::size_t>(m)],
                  s.y[static_cast<std::size_t>(m)]);
    }

    double residual = frobenius_norm(a - three_term_model(shape, s).evaluate());
    FitTraceRow row;
    row.iter = iter;
    row.residual = residual;
    // Per-term magnitudes mirror CP coefficients: the three terms have norms
    // ‖x1‖‖x2‖‖y3‖, ‖x1‖‖y2‖‖x3‖, ‖y1‖‖x2‖‖x3‖.
    row.lambdas = {norm2(s.x[0]) * norm2(s.x[1]) * norm2(s.y[2]),
                   norm2(s.x[0]) * norm2(s.y[1]) * norm2(s.x[2]),
                   norm2(s.y[0]) * norm2(s.x[1]) * norm2(s.x[2])};
    for (int m = 0; m < 3; ++m) {
      double nx = norm2(s.x[static_cast<std::size_t>(m)]);
      double ny = norm2(s.y[static_cast<std::size_t>(m)]);
      row.max_cos.push_back(
          nx == 0 || ny == 0
              ? 0.0
              : std::abs(dot(s.x[static_cast<std::size_t>(m)], s.y[static_cast<std::size_t>(m)])) /
                    (nx * ny));
    }
    row.elapsed_ms = elapsed_ms_since(start);
    trace.rows.push_back(std::move(row));

    if (iter > 1 && tol > 0 && std::abs(prev_residual - residual) <= tol * a_norm) break;
    prev_residual = residual;
  }

  WeakRank2Result result;
  result.model = three_term_model(shape, s);
  result.trace = std::move(trace);
  result.residual = result.trace.back().residual;
  return result;
}

// Converts a rank-2 CP model into the two-term boundary form by absorbing the
// coefficients into the mode-1 vectors.
BoundaryModel two_term_from_cp(const CpModel& cp) {
  BoundaryModel model;
  model.family = BoundaryFamily::two_term;
  model.shape = cp.shape;
  for (int m = 0; m < 3; ++m) {
    model.x[static_cast<std::size_t>(m)] = cp.vectors[0][static_cast<std::size_t>(m)];
    model.y[static_cast<std::size_t>(m)] = cp.vectors[1][static_cast<std::size_t>(m)];
  }
  for (double& e : model.x[0]) e *= cp.lambda[0];
  for (double& e : model.y[0]) e *= cp.lambda[1];
  return model;
}

}  // namespace

WeakRank2Result weak_rank2(const DenseTensor<double>& a, std::uint64_t seed, int restarts,
                           long max_iter, double tol) {
  if (a.order() != 3) throw std::invalid_argument("weak_rank2: tensor must have order 3");
  for (int m = 0; m < 3; ++m)
    if (a.dim(m) < 2)
      throw std::invalid_argument("weak_rank2: every mode dimension must be at least 2");
  if (restarts < 1) throw std::invalid_argument("weak_rank2: restarts must be at least 1");

  // Two-term family: plain rank-2 ALS, best over restarts, then coefficients
  // absorbed. Seeds follow the same derivation as best_rank1 so independent
  // rank-2 runs with the same base seed can never beat this branch.
  AlsResult two_best;
  bool have = false;
  for (int j = 0; j < restarts; ++j) {
    AlsResult run = als_cp(a, 2, seed + static_cast<std::uint64_t>(j), max_iter, tol);
    if (!have || run.trace.back().residual < two_best.trace.back().residual) {
      two_best = std::move(run);
      have = true;
    }
  }
  WeakRank2Result two_term;
  two_term.model = two_term_from_cp(two_best.model);
  two_term.trace = std::move(two_best.trace);
  two_term.residual = frobenius_norm(a - two_term.model.evaluate());

  WeakRank2Result three_term;
  have = false;
  for (int j = 0; j < restarts; ++j) {
    WeakRank2Result run =
        fit_three_term_once(a, seed + static_cast<std::uint64_t>(j), max_iter, tol);
    if (!have || run.residual < three_term.residual) {
      three_term = std::move(run);
      have = true;
    }
  }

  // Ties go to the two-term family: it is the generic form and the three-term
  // boundary only wins when it is strictly better.
  return three_term.residual < two_term.residual ? std::move(three_term)
                                                 : std::move(two_term);
}

DegeneracyReport degeneracy_report(const FitTrace& trace, double a_norm) {
  if (trace.empty()) throw std::invalid_argument("degeneracy_report: trace is empty");
  DegeneracyReport report;
  report.threshold = 10.0 * a_norm;
  report.final_max_cos = trace.back().max_cos;

  std::size_t terms = trace.rows.front().lambdas.size();
  std::size_t rows = trace.rows.size();
  // The tail over which monotone growth is required: the last quarter of the
  // trace, at least two rows, so early transients do not mask divergence.
  std::size_t tail_start = rows - std::max<std::size_t>(2, rows / 4);
  if (rows < 2) tail_start = 0;

  for (std::size_t t = 0; t < terms; ++t) {
    double peak = 0;
    for (const FitTraceRow& row : trace.rows)
      if (t < row.lambdas.size()) peak = std::max(peak, row.lambdas[t]);
    report.max_lambda = std::max(report.max_lambda, peak);

    bool monotone_tail = true;
    for (std::size_t i = tail_start; i + 1 < rows; ++i) {
      double cur = trace.rows[i].lambdas[t];
      double nxt = trace.rows[i + 1].lambdas[t];
      if (nxt < cur - 1e-9 * (std::abs(cur) + 1)) {
        monotone_tail = false;
        break;
      }
    }
    if (peak >= report.threshold && monotone_tail) ++report.diverging_terms;
  }

  report.bounded_model = trace.back().residual <= 2.0 * a_norm;
  report.degenerate = report.diverging_terms >= 2 && report.bounded_model;
  return report;
}

BregmanGenerator half_squared_frobenius() {
  BregmanGenerator gen;
  gen.name = "half-squared-frobenius";
  gen.phi = [](const DenseTensor<double>& a) { return 0.5 * frobenius_norm_squared(a); };
  gen.grad = [](const DenseTensor<double>& a) { return a; };
  gen.in_domain = nullptr;
  return gen;
}

double bregman(const DenseTensor<double>& a, const DenseTensor<double>& b,
               const BregmanGenerator& gen) {
  check_same_shape(a, b, "bregman");
  if (gen.in_domain && !gen.in_domain(b))
    throw std::invalid_argument("bregman: second argument is outside the generator's domain");
  return gen.phi(a) - gen.phi(b) - frobenius(gen.grad(b), a - b);
}

}  // namespace tenrank
