#include "idemlab/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace idemlab::io {

using nlohmann::json;

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("matrix_to_json: matrix is not square");
  json entries = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) entries.push_back(complex_to_json(m(i, j)));
  }
  return json{{"n", m.rows()}, {"entries", std::move(entries)}};
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_object()) throw InputError("matrix: expected a JSON object");
  if (!j.contains("n") || !j["n"].is_number_integer()) {
    throw InputError("matrix: field 'n' must be an integer");
  }
  const auto n = j["n"].get<long long>();
  if (n < 1) throw InputError("matrix: 'n' must be positive");
  if (!j.contains("entries") || !j["entries"].is_array()) {
    throw InputError("matrix: field 'entries' must be an array");
  }
  const auto& entries = j["entries"];
  if (static_cast<long long>(entries.size()) != n * n) {
    throw InputError("matrix: 'entries' has " + std::to_string(entries.size()) +
                     " elements, expected n^2 = " + std::to_string(n * n));
  }
  ComplexMatrix m(n, n);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw InputError("matrix: entry " + std::to_string(k) + " is not a [re, im] pair");
    }
    const double re = e[0].get<double>();
    const double im = e[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im)) {
      throw InputError("matrix: entry " + std::to_string(k) + " is not finite");
    }
    m(static_cast<Index>(k) / n, static_cast<Index>(k) % n) = Complex(re, im);
  }
  return m;
}

std::string write_matrix(const ComplexMatrix& m) { return matrix_to_json(m).dump() + "\n"; }

ComplexMatrix read_matrix(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line and column.
    int line = 1;
    int column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << source << ":" << line << ":" << column << ": malformed JSON";
    throw InputError(msg.str(), line, column);
  }
  try {
    return matrix_from_json(j);
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  }
}

ComplexMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_matrix(ss.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

json tolerances_to_json(const Tolerances& tol) {
  return json{{"eig_cluster", tol.eig_cluster},
              {"rank_rel", tol.rank_rel},
              {"residual", tol.residual},
              {"cond_cap", tol.cond_cap}};
}

json report_to_json(const MembershipReport& r) {
  json pairing = json::array();
  for (const auto& p : r.evidence.pairing) {
    pairing.push_back({{"alpha", complex_to_json(p.alpha)},
                       {"neg_alpha", complex_to_json(p.neg_alpha)},
                       {"mu_alpha", p.mu_alpha},
                       {"mu_neg", p.mu_neg},
                       {"segre_alpha", p.segre_alpha},
                       {"segre_neg", p.segre_neg}});
  }
  json conditions = json::array();
  for (const auto& c : r.evidence.conditions) {
    conditions.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  json nullities = json::object();
  for (const auto& [k, v] : r.evidence.nullities) nullities[k] = v;
  json values = json::object();
  for (const auto& [k, v] : r.evidence.values) values[k] = v;
  json evidence{{"pairing", pairing},
                {"conditions", conditions},
                {"nullities", nullities},
                {"values", values},
                {"warnings", r.evidence.warnings}};
  if (r.evidence.trace) evidence["trace"] = complex_to_json(*r.evidence.trace);
  return json{{"class", to_string(r.class_tag)},
              {"verdict", r.verdict},
              {"evidence", std::move(evidence)},
              {"tol_used", tolerances_to_json(r.tol_used)}};
}

json certificate_to_json(const CertificatePair& c) {
  json j{{"kind", to_string(c.kind)},
         {"left", matrix_to_json(c.left)},
         {"right", matrix_to_json(c.right)},
         {"target_residual", c.target_residual},
         {"structure_residual", c.structure_residual},
         {"condition", c.condition},
         {"attempts", c.attempts},
         {"seed", c.seed}};
  if (c.pairing_unitary) j["pairing_unitary"] = matrix_to_json(*c.pairing_unitary);
  return j;
}

json sweep_to_json(std::span<const SweepRow> rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"n", r.n}, {"residual", r.residual}, {"cond", r.cond}, {"seed", r.seed}});
  }
  return out;
}

}  // namespace idemlab::io
