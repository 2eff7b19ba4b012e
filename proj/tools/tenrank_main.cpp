#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tenrank/approx.hpp"
#include "tenrank/constructions.hpp"
#include "tenrank/io.hpp"
#include "tenrank/orbit222.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace tenrank;

std::vector<long long> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<long long> out;
  std::stringstream in(text);
  std::string piece;
  while (std::getline(in, piece, ',')) {
    try {
      std::size_t used = 0;
      long long value = std::stoll(piece, &used);
      if (used != piece.size()) throw std::invalid_argument(piece);
      out.push_back(value);
    } catch (const std::exception&) {
      throw std::invalid_argument(what + ": expected comma-separated integers, got \"" +
                                  text + "\"");
    }
  }
  if (out.empty())
    throw std::invalid_argument(what + ": expected comma-separated integers, got \"" + text +
                                "\"");
  return out;
}

Vec<Rational> unit_vec(Index dim, Index pos) {
  Vec<Rational> v(static_cast<std::size_t>(dim), Rational(0));
  v[static_cast<std::size_t>(pos)] = Rational(1);
  return v;
}

int tensor_order(const TensorAny& any) {
  return std::visit([](const auto& t) { return t.order(); }, any);
}

int cmd_classify(const std::string& path, bool exact) {
  TensorAny any = read_tensor_file(path);
  if (tensor_order(any) != 3)
    throw std::invalid_argument("classify: tensor must have order 3");

  // Rational files stay exact even without --exact; the flag forces the exact
  // backend for float files (doubles convert to rationals without rounding).
  try {
    std::optional<std::string> report;
    if (exact || is_exact_tensor(any)) {
      auto rep = classify_general(as_rational(any));
      if (rep) report = orbit_report_json(*rep);
    } else {
      auto rep = classify_general(as_double(any));
      if (rep) report = orbit_report_json(*rep);
    }
    if (!report) {
      std::cerr << "unclassified: multilinear rank exceeds (2,2,2) in some mode\n";
      return 2;
    }
    std::cout << *report << '\n';
    return 0;
  } catch (const std::runtime_error& e) {
    std::cerr << "unclassified: " << e.what() << '\n';
    return 2;
  }
}

struct GenerateOptions {
  std::string kind;
  std::string out;
  long n = 1;
  int k = 3;
  std::string exponents;
  long long r = 2;
  long long s = 1;
  std::string shape = "2,2,2";
  std::string orbit;
  std::uint64_t seed = 0;
};

int cmd_generate(const GenerateOptions& o) {
  Vec<Rational> e1 = unit_vec(2, 0);
  Vec<Rational> e2 = unit_vec(2, 1);
  std::string sidecar_path = o.out + ".witness.json";

  auto write_main = [&](const DenseTensor<Rational>& t) {
    write_tensor_file(o.out, TensorAny(t));
    std::cout << "wrote: " << o.out << '\n';
  };
  auto write_sidecar = [&](const SequenceHandle<Rational>& h, long n,
                           const SequenceElement<Rational>& el) {
    write_text_file(sidecar_path, sequence_sidecar_json(h, n, el));
    std::cout << "wrote: " << sidecar_path << '\n';
  };

  if (o.kind.rfind("canonical:", 0) == 0) {
    std::string name = o.kind.substr(10);
    auto cls = orbit_class_from_string(name);
    if (!cls) throw std::invalid_argument("generate: unknown canonical class \"" + name + "\"");
    write_main(canonical<Rational>(*cls));
  } else if (o.kind == "dsl") {
    write_main(dsl_tensor(e1, e2, e1, e2, e1, e2));
  } else if (o.kind == "dsl-seq") {
    SequenceHandle<Rational> h = dsl_sequence(e1, e2, e1, e2, e1, e2);
    SequenceElement<Rational> el = h.element(o.n);
    write_main(el.tensor);
    write_sidecar(h, o.n, el);
  } else if (o.kind == "gap") {
    SequenceHandle<Rational> h = gap_sequence<Rational>(o.r, o.s);
    SequenceElement<Rational> el = h.element(o.n);
    write_main(el.tensor);
    write_sidecar(h, o.n, el);
  } else if (o.kind == "rank-plus-one") {
    std::vector<long long> dims = parse_int_list(o.shape, "generate --shape");
    Shape shape(dims.begin(), dims.end());
    SequenceHandle<Rational> h = rank_plus_one_instance<Rational>(shape, o.r);
    write_main(h.limit);
    // The sidecar certifies the n=1 element of the approximating sequence and
    // records the limit's labeled rank, documenting the rank jump.
    write_sidecar(h, 1, h.element(1));
  } else if (o.kind == "leibniz") {
    std::vector<long long> raw = parse_int_list(o.exponents, "generate --a");
    LeibnizSpec<Rational> spec;
    spec.k = o.k;
    for (long long e : raw) spec.exponents.push_back(static_cast<int>(e));
    // Base and directions default to the standard basis of R^(j+1), which
    // keeps every limit entry 0 or 1 and makes term counting visible by eye.
    Index dim = static_cast<Index>(raw.size()) + 1;
    spec.base = unit_vec(dim, 0);
    for (Index j = 1; j < dim; ++j) spec.directions.push_back(unit_vec(dim, j));
    write_main(leibniz_tensor(spec));
  } else if (o.kind == "random-orbit") {
    auto cls = orbit_class_from_string(o.orbit);
    if (!cls)
      throw std::invalid_argument("generate: --class must name one of the 8 canonical classes");
    auto [tensor, map] = random_orbit_sample<Rational>(*cls, o.seed);
    (void)map;
    write_main(tensor);
  } else {
    throw std::invalid_argument(
        "generate: unknown kind \"" + o.kind +
        "\" (expected canonical:<name>, dsl, dsl-seq, leibniz, gap, rank-plus-one, "
        "random-orbit)");
  }
  return 0;
}

int cmd_fit(const std::string& path, Index rank, std::uint64_t seed, long max_iter,
            double tol, const std::string& trace_path) {
  DenseTensor<double> a = as_double(read_tensor_file(path));
  AlsResult res = als_cp(a, rank, seed, max_iter, tol);
  if (!trace_path.empty()) write_text_file(trace_path, trace_csv(res.trace));

  DegeneracyReport verdict = degeneracy_report(res.trace, frobenius_norm(a));
  json out;
  out["model"] = json::parse(cp_model_json(res.model));
  out["iterations"] = res.trace.rows.size();
  out["residual"] = res.trace.back().residual;
  out["degeneracy"] = json::parse(degeneracy_report_json(verdict));
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_weak2(const std::string& path, std::uint64_t seed, int restarts, long max_iter,
              double tol, const std::string& trace_path) {
  DenseTensor<double> a = as_double(read_tensor_file(path));
  WeakRank2Result res = weak_rank2(a, seed, restarts, max_iter, tol);
  if (!trace_path.empty()) write_text_file(trace_path, trace_csv(res.trace));

  json out;
  out["model"] = json::parse(boundary_model_json(res.model));
  out["residual"] = res.residual;
  bool classified = false;
  try {
    auto rep = classify_general(res.model.evaluate());
    if (rep) {
      out["approximant_class"] = to_string(rep->orbit_class);
      classified = true;
    } else {
      out["approximant_class"] = nullptr;
    }
  } catch (const std::runtime_error&) {
    out["approximant_class"] = nullptr;
  }
  std::cout << out.dump(2) << '\n';
  return classified ? 0 : 2;
}

int cmd_bregman(const std::string& path_a, const std::string& path_b) {
  DenseTensor<double> a = as_double(read_tensor_file(path_a));
  DenseTensor<double> b = as_double(read_tensor_file(path_b));
  BregmanGenerator gen = half_squared_frobenius();
  json out;
  out["generator"] = gen.name;
  out["divergence"] = bregman(a, b, gen);
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_degeneracy_demo(std::uint64_t seed, long max_iter, const std::string& trace_path) {
  DenseTensor<double> g3 = to_double_tensor(canonical<Rational>(OrbitClass::G3));
  // tol 0 disables early stopping: the point of the demo is to run the full
  // budget and watch the coefficients grow while the residual keeps falling.
  AlsResult res = als_cp(g3, 2, seed, max_iter, 0.0);
  if (!trace_path.empty()) write_text_file(trace_path, trace_csv(res.trace));

  DegeneracyReport verdict = degeneracy_report(res.trace, frobenius_norm(g3));
  json out;
  out["target"] = "canonical:G3";
  out["rank"] = 2;
  out["seed"] = seed;
  out["iterations"] = res.trace.rows.size();
  out["final_residual"] = res.trace.back().residual;
  out["degeneracy"] = json::parse(degeneracy_report_json(verdict));
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "tenrank: exact orbit classification of real 2x2x2 tensors, rank-jump sequence "
      "generators, and low-rank approximation with degeneracy instrumentation.\n"
      "Exit codes: 0 success, 1 input error, 2 unclassified."};
  app.require_subcommand(1);

  std::string classify_path;
  bool classify_exact = false;
  CLI::App* classify = app.add_subcommand(
      "classify", "Classify a tensor file and print its orbit report as JSON");
  classify->add_option("path", classify_path, "tensor file (shared JSON format)")->required();
  classify->add_flag("--exact", classify_exact, "force exact rational arithmetic");

  GenerateOptions gen;
  CLI::App* generate = app.add_subcommand(
      "generate", "Write a tensor file (plus a witness sidecar for sequence kinds)");
  generate
      ->add_option("kind", gen.kind,
                   "canonical:<name>, dsl, dsl-seq, leibniz, gap, rank-plus-one, random-orbit")
      ->required();
  generate->add_option("--out", gen.out, "output tensor file path")->required();
  generate->add_option("--n", gen.n, "sequence index for dsl-seq and gap (default 1)");
  generate->add_option("--k", gen.k, "tensor order for leibniz (default 3)");
  generate->add_option("--a", gen.exponents, "comma-separated exponents for leibniz");
  generate->add_option("--r", gen.r, "rank parameter for gap and rank-plus-one");
  generate->add_option("--s", gen.s, "jump parameter for gap");
  generate->add_option("--shape", gen.shape, "comma-separated shape for rank-plus-one");
  generate->add_option("--class", gen.orbit, "orbit class for random-orbit");
  generate->add_option("--seed", gen.seed, "seed for random-orbit");

  std::string fit_path, fit_trace;
  Index fit_rank = 1;
  std::uint64_t fit_seed = 0;
  long fit_max_iter = tenrank::defaults::als_max_iter;
  double fit_tol = tenrank::defaults::als_tol;
  CLI::App* fit = app.add_subcommand("fit", "Rank-r CP fit via alternating least squares");
  fit->add_option("path", fit_path, "tensor file")->required();
  fit->add_option("--rank", fit_rank, "CP rank (>= 1)")->required();
  fit->add_option("--seed", fit_seed, "random initialization seed");
  fit->add_option("--max-iter", fit_max_iter, "sweep budget");
  fit->add_option("--tol", fit_tol, "relative residual-change stop (0 disables)");
  fit->add_option("--trace", fit_trace, "write the iteration trace CSV here");

  std::string weak2_path, weak2_trace;
  std::uint64_t weak2_seed = 0;
  int weak2_restarts = tenrank::defaults::restarts;
  long weak2_max_iter = tenrank::defaults::als_max_iter;
  double weak2_tol = tenrank::defaults::als_tol;
  CLI::App* weak2 = app.add_subcommand(
      "weak2", "Best border-rank-2 approximation over the two boundary families");
  weak2->add_option("path", weak2_path, "tensor file (order 3, all dims >= 2)")->required();
  weak2->add_option("--seed", weak2_seed, "random initialization seed");
  weak2->add_option("--restarts", weak2_restarts, "restarts per family");
  weak2->add_option("--max-iter", weak2_max_iter, "sweep budget");
  weak2->add_option("--tol", weak2_tol, "relative residual-change stop (0 disables)");
  weak2->add_option("--trace", weak2_trace, "write the winning family's trace CSV here");

  std::string bregman_a, bregman_b;
  CLI::App* breg = app.add_subcommand(
      "bregman", "Divergence D(A,B) for the half-squared-Frobenius generator");
  breg->add_option("a", bregman_a, "tensor file A")->required();
  breg->add_option("b", bregman_b, "tensor file B")->required();

  CLI::App* table = app.add_subcommand(
      "reproduce-table1", "Recompute and print the canonical 2x2x2 orbit table");

  std::string demo_trace;
  std::uint64_t demo_seed = 7;
  long demo_max_iter = 5000;
  CLI::App* demo = app.add_subcommand(
      "degeneracy-demo", "Run rank-2 ALS on canonical G3 and report the divergence verdict");
  demo->add_option("--seed", demo_seed, "random initialization seed");
  demo->add_option("--max-iter", demo_max_iter, "sweep budget");
  demo->add_option("--trace", demo_trace, "write the iteration trace CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(classify)) return cmd_classify(classify_path, classify_exact);
    if (app.got_subcommand(generate)) return cmd_generate(gen);
    if (app.got_subcommand(fit))
      return cmd_fit(fit_path, fit_rank, fit_seed, fit_max_iter, fit_tol, fit_trace);
    if (app.got_subcommand(weak2))
      return cmd_weak2(weak2_path, weak2_seed, weak2_restarts, weak2_max_iter, weak2_tol,
                       weak2_trace);
    if (app.got_subcommand(breg)) return cmd_bregman(bregman_a, bregman_b);
    if (app.got_subcommand(table)) {
      std::cout << tenrank::orbit_table_markdown();
      return 0;
    }
    if (app.got_subcommand(demo))
      return cmd_degeneracy_demo(demo_seed, demo_max_iter, demo_trace);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
