#include "idemlab/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "idemlab/io.hpp"

namespace idemlab::cli {

namespace {

using nlohmann::json;

struct TolFlags {
  std::optional<double> eig, rank, residual, cond_cap;

  void attach(CLI::App* app) {
    app->add_option("--tol-eig", eig, "relative eigenvalue clustering radius");
    app->add_option("--tol-rank", rank, "relative singular-value cut for rank decisions");
    app->add_option("--tol-residual", residual, "residual tolerance");
    app->add_option("--cond-cap", cond_cap, "largest admissible similarity condition number");
  }

  Tolerances resolve() const {
    Tolerances tol;
    if (const char* profile = std::getenv("IDEMLAB_TOL_PROFILE"); profile && *profile) {
      tol = tolerance_preset(profile);
    }
    if (eig) tol.eig_cluster = *eig;
    if (rank) tol.rank_rel = *rank;
    if (residual) tol.residual = *residual;
    if (cond_cap) tol.cond_cap = *cond_cap;
    tol.validate();
    return tol;
  }
};

json header(const Tolerances& tol, std::uint64_t seed) {
  return json{{"schema", io::kSchema}, {"tol", io::tolerances_to_json(tol)}, {"seed", seed}};
}

// Construct kinds map to the decider that must accept the input.
const std::map<std::string, ClassTag>& construct_kinds() {
  static const std::map<std::string, ClassTag> kinds{
      {"coi", ClassTag::coi},           {"coi-approx", ClassTag::clos_coi},
      {"doi", ClassTag::doi},           {"doi-approx", ClassTag::clos_doi},
      {"cop", ClassTag::cop},           {"dop", ClassTag::dop}};
  return kinds;
}

CertificateKind verify_kind(const std::string& name) {
  if (name == "coi" || name == "coi-approx") return CertificateKind::idempotent_commutator;
  if (name == "doi" || name == "doi-approx") return CertificateKind::idempotent_difference;
  if (name == "cop") return CertificateKind::projection_commutator;
  if (name == "dop") return CertificateKind::projection_difference;
  return certificate_kind_from_string(name);
}

// ---------------------------------------------------------------------------

int cmd_classify(const std::string& input, const std::vector<std::string>& classes,
                 const Tolerances& tol, std::uint64_t seed, std::ostream& out) {
  const ComplexMatrix t = io::read_matrix_file(input);
  std::vector<ClassTag> tags;
  for (const auto& c : classes) tags.push_back(class_tag_from_string(c));
  if (tags.empty()) tags = all_class_tags();
  json reports = json::array();
  for (ClassTag tag : tags) reports.push_back(io::report_to_json(classify(t, tag, tol)));
  json doc = header(tol, seed);
  doc["input"] = input;
  doc["reports"] = std::move(reports);
  out << doc.dump(2) << "\n";
  return kOk;
}

int cmd_construct(const std::string& input, const std::string& kind, double eps,
                  const std::string& out_prefix, const Tolerances& tol, std::uint64_t seed,
                  std::ostream& out, std::ostream& err) {
  const auto it = construct_kinds().find(kind);
  if (it == construct_kinds().end()) throw io::InputError("unknown construct kind '" + kind + "'");
  const ComplexMatrix t = io::read_matrix_file(input);
  json doc = header(tol, seed);
  doc["input"] = input;
  doc["kind"] = kind;
  const bool approx = kind.ends_with("-approx");
  if (approx) doc["eps"] = eps;

  const MembershipReport report = classify(t, it->second, tol);
  if (!report.verdict) {
    doc["status"] = "rejected";
    doc["report"] = io::report_to_json(report);
    out << doc.dump(2) << "\n";
    return kRejected;
  }

  CertificatePair pair;
  try {
    if (kind == "coi") pair = coi_exact(t, tol);
    if (kind == "coi-approx") pair = coi_approximant(t, eps, tol, seed).pair;
    if (kind == "doi") pair = doi_exact(t, tol);
    if (kind == "doi-approx") pair = doi_approximant(t, eps, tol, seed);
    if (kind == "cop") pair = cop_pair(t, tol);
    if (kind == "dop") pair = dop_pair(t, tol);
  } catch (const PreconditionError& e) {
    doc["status"] = "rejected";
    doc["message"] = e.what();
    doc["report"] = io::report_to_json(report);
    out << doc.dump(2) << "\n";
    return kRejected;
  } catch (const Error& e) {
    doc["status"] = "failed";
    doc["message"] = e.what();
    out << doc.dump(2) << "\n";
    err << "construct: " << e.what() << "\n";
    return kVerifyFailed;
  }

  json cert = io::certificate_to_json(pair);
  cert.erase("left");
  cert.erase("right");
  doc["status"] = "ok";
  doc["certificate"] = std::move(cert);
  if (!out_prefix.empty()) {
    const std::string left = out_prefix + ".left.json";
    const std::string right = out_prefix + ".right.json";
    io::write_text_file(left, io::write_matrix(pair.left));
    io::write_text_file(right, io::write_matrix(pair.right));
    doc["files"] = {{"left", left}, {"right", right}};
    io::write_text_file(out_prefix + ".summary.json", doc.dump(2) + "\n");
  } else {
    doc["left"] = io::matrix_to_json(pair.left);
    doc["right"] = io::matrix_to_json(pair.right);
  }
  out << doc.dump(2) << "\n";
  return kOk;
}

/// Checks a certificate from scratch; only the norms are shared with the library.
int cmd_verify(const std::string& left_path, const std::string& right_path,
               const std::string& kind_name, const std::string& target_path,
               std::optional<double> eps, const Tolerances& tol, std::ostream& out) {
  const CertificateKind kind = verify_kind(kind_name);
  const ComplexMatrix left = io::read_matrix_file(left_path);
  const ComplexMatrix right = io::read_matrix_file(right_path);
  if (left.rows() != right.rows()) throw io::InputError("verify: left and right differ in size");
  std::optional<ComplexMatrix> target;
  if (!target_path.empty()) {
    target = io::read_matrix_file(target_path);
    if (target->rows() != left.rows()) {
      throw io::InputError("verify: target differs in size from the pair");
    }
  }

  const bool projections = kind == CertificateKind::projection_commutator ||
                           kind == CertificateKind::projection_difference;
  json structure = json::object();
  bool pass = true;
  auto check_factor = [&](const char* name, const ComplexMatrix& m) {
    const double norm = opnorm(m);
    const ComplexMatrix square = m * m;
    const double defect = opnorm(square - m);
    const double relative = defect / std::max(1.0, norm * norm);
    structure[std::string(name) + "_idempotent_defect"] = defect;
    structure[std::string(name) + "_relative_defect"] = relative;
    pass = pass && relative <= tol.residual;
    if (projections) {
      const double herm = opnorm(m - m.adjoint());
      structure[std::string(name) + "_hermitian_defect"] = herm;
      pass = pass && herm <= tol.residual * std::max(1.0, norm);
    }
  };
  check_factor("left", left);
  check_factor("right", right);

  json doc = header(tol, 0);
  doc["kind"] = to_string(kind);
  doc["structure"] = std::move(structure);
  if (target) {
    const bool commutator_kind = kind == CertificateKind::idempotent_commutator ||
                                 kind == CertificateKind::projection_commutator;
    const ComplexMatrix combined =
        commutator_kind ? ComplexMatrix(left * right - right * left) : ComplexMatrix(left - right);
    const double residual = opnorm(combined - *target);
    const double bound = eps ? *eps : tol.residual * std::max(1.0, opnorm(*target));
    doc["target_residual"] = residual;
    doc["bound"] = bound;
    pass = pass && (eps ? residual < bound : residual <= bound);
  }
  doc["pass"] = pass;
  out << doc.dump(2) << "\n";
  return pass ? kOk : kVerifyFailed;
}

int cmd_sweep(const CompactProfile& profile, const std::vector<int>& dims, double eps,
              const std::string& out_path, bool as_json, const Tolerances& tol,
              std::ostream& out) {
  profile.validate();
  if (!profile.paired) throw PreconditionError("sweep: the profile must be paired");
  const auto rows = truncation_residual_sweep(profile, dims, eps, tol);
  const std::string csv = sweep_csv(rows);
  if (!out_path.empty()) io::write_text_file(out_path, csv);
  if (as_json) {
    json doc = header(tol, profile.seed);
    doc["eps"] = eps;
    doc["rows"] = io::sweep_to_json(rows);
    out << doc.dump(2) << "\n";
  } else if (out_path.empty()) {
    out << csv;
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"idemlab: commutators and differences of idempotents"};
  app.require_subcommand(1);
  TolFlags tol_flags;
  std::uint64_t seed = 0;

  auto* classify_cmd = app.add_subcommand("classify", "test a matrix against the classes");
  std::string input;
  std::vector<std::string> classes;
  classify_cmd->add_option("input", input, "matrix JSON file")->required();
  classify_cmd->add_option("--class", classes, "classes to test (default: all)")->delimiter(',');
  classify_cmd->add_option("--seed", seed, "recorded in the report");
  tol_flags.attach(classify_cmd);

  auto* construct_cmd = app.add_subcommand("construct", "build a certificate pair");
  std::string kind;
  double eps = 1e-3;
  std::string out_prefix;
  construct_cmd->add_option("input", input, "matrix JSON file")->required();
  construct_cmd->add_option("--kind", kind, "coi, coi-approx, doi, doi-approx, cop or dop")
      ->required();
  construct_cmd->add_option("--eps", eps, "approximation bound for approximant kinds");
  construct_cmd->add_option("--out", out_prefix, "write PREFIX.left.json, PREFIX.right.json");
  construct_cmd->add_option("--seed", seed, "jitter seed");
  tol_flags.attach(construct_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "check a certificate pair");
  std::string left_path, right_path, target_path;
  std::optional<double> verify_eps;
  verify_cmd->add_option("--left", left_path, "left matrix")->required();
  verify_cmd->add_option("--right", right_path, "right matrix")->required();
  verify_cmd->add_option("--kind", kind, "certificate kind")->required();
  verify_cmd->add_option("--target", target_path, "target matrix");
  verify_cmd->add_option("--eps", verify_eps, "bound on the target residual");
  tol_flags.attach(verify_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "truncation residual sweep");
  std::string decay = "geometric";
  double parameter = 0.5;
  bool unpaired = false;
  int tail = 0;
  std::vector<int> dims;
  std::string csv_path;
  bool as_json = false;
  sweep_cmd->add_option("--decay", decay, "geometric or power");
  sweep_cmd->add_option("--param", parameter, "ratio (geometric) or exponent (power)");
  sweep_cmd->add_flag("--unpaired", unpaired, "do not pair the spectrum");
  sweep_cmd->add_option("--tail", tail, "nilpotent tail dimension");
  sweep_cmd->add_option("--dims", dims, "dimensions, e.g. 4,8,16")->delimiter(',');
  sweep_cmd->add_option("--eps", eps, "approximation bound");
  sweep_cmd->add_option("--seed", seed, "generator seed");
  sweep_cmd->add_option("--out", csv_path, "CSV output path");
  sweep_cmd->add_flag("--json", as_json, "print the table as JSON");
  tol_flags.attach(sweep_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "idemlab: " << e.what() << "\n";
    return kInputError;
  }

  try {
    const Tolerances tol = tol_flags.resolve();
    if (*classify_cmd) return cmd_classify(input, classes, tol, seed, out);
    if (*construct_cmd) {
      return cmd_construct(input, kind, eps, out_prefix, tol, seed, out, err);
    }
    if (*verify_cmd) {
      return cmd_verify(left_path, right_path, kind, target_path, verify_eps, tol, out);
    }
    if (*sweep_cmd) {
      CompactProfile profile;
      if (decay == "geometric") {
        profile.decay = CompactProfile::Decay::geometric;
      } else if (decay == "power") {
        profile.decay = CompactProfile::Decay::power;
      } else {
        throw io::InputError("unknown decay '" + decay + "'");
      }
      profile.parameter = parameter;
      profile.paired = !unpaired;
      profile.nilpotent_tail_dim = tail;
      profile.seed = seed;
      return cmd_sweep(profile, dims, eps, csv_path, as_json, tol, out);
    }
  } catch (const io::InputError& e) {
    err << "idemlab: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "idemlab: " << e.what() << "\n";
    return kInputError;
  } catch (const PreconditionError& e) {
    err << "idemlab: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "idemlab: " << e.what() << "\n";
    return kVerifyFailed;
  }
  return kInputError;
}

}  // namespace idemlab::cli
