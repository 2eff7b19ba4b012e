#ifndef TENRANK_IO_HPP
#define TENRANK_IO_HPP

#include <string>
#include <variant>

#include "tenrank/approx.hpp"
#include "tenrank/constructions.hpp"
#include "tenrank/orbit222.hpp"
#include "tenrank/scalar.hpp"
#include "tenrank/tensor.hpp"

namespace tenrank {

// A tensor in either scalar backend, as read from a file. The file format is
// a JSON object {"shape":[d1,...,dk], "scalar":"f64"|"rational", "data":[...]}
// with data row-major; rational entries are strings "p/q" (a bare "p" is
// accepted on input, the canonical "p/q" is always emitted).
using TensorAny = std::variant<DenseTensor<double>, DenseTensor<Rational>>;

std::string tensor_to_json(const DenseTensor<double>& a);
std::string tensor_to_json(const DenseTensor<Rational>& a);

// Parses the shared tensor format; throws std::runtime_error with a readable
// message on malformed input (bad JSON, missing fields, length mismatch).
TensorAny tensor_from_json_text(const std::string& text);

TensorAny read_tensor_file(const std::string& path);
void write_tensor_file(const std::string& path, const TensorAny& a);
void write_text_file(const std::string& path, const std::string& text);

bool is_exact_tensor(const TensorAny& a);

// Backend conversions. Doubles are binary rationals, so the widening
// conversion is exact; the narrowing one rounds to nearest.
DenseTensor<double> as_double(const TensorAny& a);
DenseTensor<Rational> as_rational(const TensorAny& a);

// Classification report as JSON: class, delta, mlrank, outer_rank,
// border_rank, witness (three row-major matrices or null). Rational scalars
// serialize as "p/q" strings, doubles as numbers.
std::string orbit_report_json(const OrbitReport<double>& rep);
std::string orbit_report_json(const OrbitReport<Rational>& rep);

std::string cp_model_json(const CpModel& model);
std::string boundary_model_json(const BoundaryModel& model);
std::string degeneracy_report_json(const DegeneracyReport& report);

// CSV with header iter,residual,lambda_1..lambda_r,cos_mode1..cos_modek,elapsed_ms.
std::string trace_csv(const FitTrace& trace);

// Sidecar emitted next to generated sequence elements: the element index, the
// CP witness certifying its rank bound, and the limit's labeled rank with
// provenance.
std::string sequence_sidecar_json(const SequenceHandle<double>& handle, long n,
                                  const SequenceElement<double>& element);
std::string sequence_sidecar_json(const SequenceHandle<Rational>& handle, long n,
                                  const SequenceElement<Rational>& element);

}  // namespace tenrank

#endif  // TENRANK_IO_HPP
