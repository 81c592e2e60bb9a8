#pragma once

#include <string>

#include "idemlab/classify.hpp"
#include "idemlab/compact.hpp"
#include "idemlab/construct.hpp"
#include "json.hpp"

namespace idemlab::io {

inline constexpr const char* kSchema = "idemlab/1";

/// Malformed input, with a 1-based line/column position when known.
class InputError : public Error {
public:
  InputError(const std::string& what, int line = 0, int column = 0)
      : Error(what), line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  int line_;
  int column_;
};

/// {"n": n, "entries": [[re, im], ...]} in row-major order.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

std::string write_matrix(const ComplexMatrix& m);
/// Parses matrix JSON text; `source` names the input in diagnostics.
ComplexMatrix read_matrix(const std::string& text, const std::string& source = "<input>");
ComplexMatrix read_matrix_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

nlohmann::json complex_to_json(Complex z);
nlohmann::json tolerances_to_json(const Tolerances& tol);
nlohmann::json report_to_json(const MembershipReport& r);
nlohmann::json certificate_to_json(const CertificatePair& c);
nlohmann::json sweep_to_json(std::span<const SweepRow> rows);

}  // namespace idemlab::io
