#ifndef TENRANK_APPROX_HPP
#define TENRANK_APPROX_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tenrank/constructions.hpp"
#include "tenrank/defaults.hpp"
#include "tenrank/tensor.hpp"

namespace tenrank {

// Normalized CP model Σ_i λ_i · u_i^{(1)}⊗…⊗u_i^{(k)}: coefficients are
// nonnegative and every stored mode vector has unit 2-norm, so coefficient
// blow-up is visible in λ alone.
struct CpModel {
  Shape shape;
  std::vector<double> lambda;                     // λ_i ≥ 0, sorted descending
  std::vector<std::vector<Vec<double>>> vectors;  // [term][mode], unit 2-norm

  Index rank() const { return static_cast<Index>(lambda.size()); }
  std::vector<CpTerm<double>> terms() const;
  DenseTensor<double> evaluate() const;
};

// One optimizer iteration as recorded for later analysis: the residual, the
// coefficient magnitudes, the largest absolute pairwise cosine between term
// vectors in each mode (1 signals collapsing directions; 0 is emitted when
// there is a single term), and wall-clock time since the run started.
struct FitTraceRow {
  long iter = 0;
  double residual = 0;
  std::vector<double> lambdas;
  std::vector<double> max_cos;
  double elapsed_ms = 0;
};

struct FitTrace {
  std::vector<FitTraceRow> rows;

  bool empty() const { return rows.empty(); }
  const FitTraceRow& back() const { return rows.back(); }
};

struct AlsResult {
  CpModel model;
  FitTrace trace;
};

// Alternating least squares for rank-r CP approximation: cyclic exact
// least-squares updates of one mode's factor block at a time, Gaussian random
// initialization from the seed, stop on relative residual change below tol or
// after max_iter sweeps (tol = 0 disables early stopping). Singular normal
// equations fall back to a trace-scaled Tikhonov ridge so iterations stay
// defined near degeneracy, where coefficients genuinely blow up.
AlsResult als_cp(const DenseTensor<double>& a, Index rank, std::uint64_t seed,
                 long max_iter = defaults::als_max_iter, double tol = defaults::als_tol);

// Multi-restart rank-1 fit. Unlike higher ranks this problem always has an
// attained optimum; at convergence λ = ⟨A, u⊗…⟩ and residual² = ‖A‖² − λ².
AlsResult best_rank1(const DenseTensor<double>& a, std::uint64_t seed,
                     int restarts = defaults::restarts, long max_iter = defaults::als_max_iter,
                     double tol = defaults::als_tol);

// The two parameterized families whose union covers every limit of rank-2
// tensors in the order-3 case: honest rank-2 sums and the three-term boundary
// form that rank-2 sequences can converge to without the limit having rank 2.
enum class BoundaryFamily { two_term, three_term_boundary };

inline const char* to_string(BoundaryFamily f) {
  return f == BoundaryFamily::two_term ? "two-term" : "three-term-boundary";
}

struct BoundaryModel {
  BoundaryFamily family = BoundaryFamily::two_term;
  Shape shape;
  std::array<Vec<double>, 3> x;
  std::array<Vec<double>, 3> y;

  // two-term: x1⊗x2⊗x3 + y1⊗y2⊗y3; three-term: x1⊗x2⊗y3 + x1⊗y2⊗x3 + y1⊗x2⊗x3.
  DenseTensor<double> evaluate() const;
};

struct WeakRank2Result {
  BoundaryModel model;
  FitTrace trace;
  double residual = 0;
};

// Minimizes ‖A − B‖ over the closure of the rank-2 set by optimizing both
// families to convergence (block least squares over each of the six vectors,
// multi-restart) and keeping the better one. The returned residual is an
// attained value, hence a certified upper bound on the distance to the
// closure; on inputs with no rank-2 minimizer the winning model sits on the
// three-term boundary.
WeakRank2Result weak_rank2(const DenseTensor<double>& a, std::uint64_t seed,
                           int restarts = defaults::restarts,
                           long max_iter = defaults::als_max_iter,
                           double tol = defaults::als_tol);

// Post-hoc verdict on a CP fitting trace: a run is flagged degenerate when at
// least two coefficient series blow past 10·‖A‖ with a monotone tail while
// the model sum itself stays near the target, the signature of diverging
// rank-1 terms cancelling each other.
struct DegeneracyReport {
  bool degenerate = false;
  int diverging_terms = 0;
  bool bounded_model = false;
  std::vector<double> final_max_cos;  // per mode, from the last iteration
  double max_lambda = 0;
  double threshold = 0;
};

DegeneracyReport degeneracy_report(const FitTrace& trace, double a_norm);

// Divergence generator: a strictly convex φ with gradient ∇φ and a domain
// membership test for the second argument.
struct BregmanGenerator {
  std::string name;
  std::function<double(const DenseTensor<double>&)> phi;
  std::function<DenseTensor<double>(const DenseTensor<double>&)> grad;
  std::function<bool(const DenseTensor<double>&)> in_domain;  // null means everywhere
};

// Built-in generator φ = ½‖·‖²_F, for which the divergence is ½‖A−B‖²_F.
BregmanGenerator half_squared_frobenius();

// D_φ(A,B) = φ(A) − φ(B) − ⟨∇φ(B), A−B⟩.
double bregman(const DenseTensor<double>& a, const DenseTensor<double>& b,
               const BregmanGenerator& gen);

}  // namespace tenrank

#endif  // TENRANK_APPROX_HPP
