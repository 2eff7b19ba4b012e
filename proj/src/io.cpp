#include "tenrank/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace tenrank {
namespace {

// ordered_json keeps fields in insertion order so emitted files are stable
// and diff-friendly across runs.
using json = nlohmann::ordered_json;

json scalar_entry(double x) { return json(x); }
json scalar_entry(const Rational& x) { return json(format_rational(x)); }

template <class T>
json vec_to_json(const Vec<T>& v) {
  json out = json::array();
  for (const T& x : v) out.push_back(scalar_entry(x));
  return out;
}

template <class T>
json matrix_to_json(const Mat<T>& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols; ++j) row.push_back(scalar_entry(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class T>
std::string tensor_to_json_impl(const DenseTensor<T>& a) {
  json j;
  j["shape"] = a.shape();
  j["scalar"] = ScalarTraits<T>::kind_name;
  json data = json::array();
  for (const T& x : a.data()) data.push_back(scalar_entry(x));
  j["data"] = std::move(data);
  return j.dump(2);
}

Shape shape_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw std::runtime_error("tensor file: \"shape\" must be a non-empty array of integers");
  Shape shape;
  for (const auto& d : j) {
    if (!d.is_number_integer())
      throw std::runtime_error("tensor file: \"shape\" must be a non-empty array of integers");
    Index dim = d.get<Index>();
    if (dim < 1) throw std::runtime_error("tensor file: shape entries must be positive");
    shape.push_back(dim);
  }
  return shape;
}

Rational rational_entry_from_json(const json& entry) {
  if (entry.is_string()) {
    try {
      return parse_rational(entry.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string("tensor file: ") + e.what());
    }
  }
  // Bare integers are unambiguous; any other number would silently pick up
  // binary rounding, so those must be written as "p/q" strings. The decimal
  // text round-trip covers the full 64-bit range without narrowing.
  if (entry.is_number_integer()) return parse_rational(entry.dump());
  throw std::runtime_error(
      "tensor file: rational data entries must be strings like \"p/q\" or integers");
}

}  // namespace

std::string tensor_to_json(const DenseTensor<double>& a) { return tensor_to_json_impl(a); }
std::string tensor_to_json(const DenseTensor<Rational>& a) { return tensor_to_json_impl(a); }

TensorAny tensor_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("tensor file: invalid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw std::runtime_error("tensor file: top level must be a JSON object");
  for (const char* field : {"shape", "scalar", "data"})
    if (!j.contains(field))
      throw std::runtime_error(std::string("tensor file: missing field \"") + field + "\"");

  Shape shape = shape_from_json(j["shape"]);
  if (!j["scalar"].is_string())
    throw std::runtime_error("tensor file: \"scalar\" must be \"f64\" or \"rational\"");
  std::string scalar = j["scalar"].get<std::string>();
  const json& data = j["data"];
  if (!data.is_array()) throw std::runtime_error("tensor file: \"data\" must be an array");
  Index expected = shape_size(shape);
  if (static_cast<Index>(data.size()) != expected)
    throw std::runtime_error("tensor file: data has " + std::to_string(data.size()) +
                             " entries but the shape needs " + std::to_string(expected));

  if (scalar == "f64") {
    std::vector<double> values;
    values.reserve(data.size());
    for (const auto& entry : data) {
      if (!entry.is_number())
        throw std::runtime_error("tensor file: f64 data entries must be numbers");
      values.push_back(entry.get<double>());
    }
    return DenseTensor<double>(shape, std::move(values));
  }
  if (scalar == "rational") {
    std::vector<Rational> values;
    values.reserve(data.size());
    for (const auto& entry : data) values.push_back(rational_entry_from_json(entry));
    return DenseTensor<Rational>(shape, std::move(values));
  }
  throw std::runtime_error("tensor file: scalar must be \"f64\" or \"rational\", got \"" +
                           scalar + "\"");
}

TensorAny read_tensor_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tensor file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return tensor_from_json_text(buffer.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_tensor_file(const std::string& path, const TensorAny& a) {
  std::visit([&](const auto& t) { write_text_file(path, tensor_to_json(t)); }, a);
}

bool is_exact_tensor(const TensorAny& a) {
  return std::holds_alternative<DenseTensor<Rational>>(a);
}

DenseTensor<double> as_double(const TensorAny& a) {
  if (const auto* d = std::get_if<DenseTensor<double>>(&a)) return *d;
  return to_double_tensor(std::get<DenseTensor<Rational>>(a));
}

DenseTensor<Rational> as_rational(const TensorAny& a) {
  if (const auto* q = std::get_if<DenseTensor<Rational>>(&a)) return *q;
  return to_rational_tensor(std::get<DenseTensor<double>>(a));
}

namespace {

template <class T>
std::string orbit_report_json_impl(const OrbitReport<T>& rep) {
  json j;
  j["class"] = to_string(rep.orbit_class);
  j["delta"] = scalar_entry(rep.delta_value);
  j["mlrank"] = rep.mlrank.ranks;
  j["outer_rank"] = rep.outer_rank;
  j["border_rank"] = rep.border_rank;
  if (rep.witness) {
    json factors = json::array();
    for (const auto& f : rep.witness->factors) factors.push_back(matrix_to_json(f));
    j["witness"] = std::move(factors);
  } else {
    j["witness"] = nullptr;
  }
  return j.dump(2);
}

template <class T>
std::string sequence_sidecar_json_impl(const SequenceHandle<T>& handle, long n,
                                       const SequenceElement<T>& element) {
  json j;
  j["n"] = n;
  j["element_rank_bound"] = handle.element_rank_bound;
  j["limit_rank"] = handle.limit_rank;
  j["limit_rank_provenance"] = to_string(handle.limit_rank_provenance);
  json terms = json::array();
  for (const auto& term : element.witness) {
    json t;
    t["weight"] = scalar_entry(term.weight);
    json vectors = json::array();
    for (const auto& v : term.vectors) vectors.push_back(vec_to_json(v));
    t["vectors"] = std::move(vectors);
    terms.push_back(std::move(t));
  }
  j["witness"] = std::move(terms);
  return j.dump(2);
}

}  // namespace

std::string orbit_report_json(const OrbitReport<double>& rep) {
  return orbit_report_json_impl(rep);
}
std::string orbit_report_json(const OrbitReport<Rational>& rep) {
  return orbit_report_json_impl(rep);
}

std::string cp_model_json(const CpModel& model) {
  json j;
  j["family"] = "cp";
  j["shape"] = model.shape;
  j["coefficients"] = model.lambda;
  json vectors = json::array();
  for (const auto& term : model.vectors) {
    json per_mode = json::array();
    for (const auto& v : term) per_mode.push_back(vec_to_json(v));
    vectors.push_back(std::move(per_mode));
  }
  j["vectors"] = std::move(vectors);
  return j.dump(2);
}

std::string boundary_model_json(const BoundaryModel& model) {
  // Serialize term-by-term in the same [term][mode] layout as CP models, so
  // downstream tooling can evaluate either family uniformly. Weights are
  // absorbed into the vectors, hence the unit coefficients.
  std::vector<std::vector<Vec<double>>> terms;
  if (model.family == BoundaryFamily::two_term) {
    terms = {{model.x[0], model.x[1], model.x[2]}, {model.y[0], model.y[1], model.y[2]}};
  } else {
    terms = {{model.x[0], model.x[1], model.y[2]},
             {model.x[0], model.y[1], model.x[2]},
             {model.y[0], model.x[1], model.x[2]}};
  }
  json j;
  j["family"] = to_string(model.family);
  j["shape"] = model.shape;
  j["coefficients"] = std::vector<double>(terms.size(), 1.0);
  json vectors = json::array();
  for (const auto& term : terms) {
    json per_mode = json::array();
    for (const auto& v : term) per_mode.push_back(vec_to_json(v));
    vectors.push_back(std::move(per_mode));
  }
  j["vectors"] = std::move(vectors);
  return j.dump(2);
}

std::string degeneracy_report_json(const DegeneracyReport& report) {
  json j;
  j["degenerate"] = report.degenerate;
  j["diverging_terms"] = report.diverging_terms;
  j["bounded_model"] = report.bounded_model;
  j["final_max_cos"] = report.final_max_cos;
  j["max_lambda"] = report.max_lambda;
  j["threshold"] = report.threshold;
  return j.dump(2);
}

std::string trace_csv(const FitTrace& trace) {
  std::ostringstream out;
  out << std::setprecision(17);
  std::size_t n_lambda = trace.empty() ? 0 : trace.rows.front().lambdas.size();
  std::size_t n_cos = trace.empty() ? 0 : trace.rows.front().max_cos.size();
  out << "iter,residual";
  for (std::size_t i = 0; i < n_lambda; ++i) out << ",lambda_" << (i + 1);
  for (std::size_t m = 0; m < n_cos; ++m) out << ",cos_mode" << (m + 1);
  out << ",elapsed_ms\n";
  for (const FitTraceRow& row : trace.rows) {
    out << row.iter << ',' << row.residual;
    for (double l : row.lambdas) out << ',' << l;
    for (double c : row.max_cos) out << ',' << c;
    out << ',' << row.elapsed_ms << '\n';
  }
  return out.str();
}

std::string sequence_sidecar_json(const SequenceHandle<double>& handle, long n,
                                  const SequenceElement<double>& element) {
  return sequence_sidecar_json_impl(handle, n, element);
}
std::string sequence_sidecar_json(const SequenceHandle<Rational>& handle, long n,
                                  const SequenceElement<Rational>& element) {
  return sequence_sidecar_json_impl(handle, n, element);
}

}  // namespace tenrank
