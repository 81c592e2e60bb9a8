#include <unistd.h>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "idemlab/cli.hpp"
#include "idemlab/io.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace idemlab;
using nlohmann::json;
using oracle::I;

namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("idemlab_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string put(const std::string& name, const ComplexMatrix& m) {
  const std::string path = (scratch() / name).string();
  io::write_text_file(path, io::write_matrix(m));
  return path;
}

std::string put_text(const std::string& name, const std::string& text) {
  const std::string path = (scratch() / name).string();
  io::write_text_file(path, text);
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ComplexMatrix W() {
  return oracle::block_diag(oracle::diag({2.0, 2.0}), oracle::from_rows({{-2.0, 1.0}, {0.0, -2.0}}));
}

ComplexMatrix T0() {
  ComplexMatrix a0 = oracle::from_rows({{0.5 * I, 1.0}, {0.0, 0.5 * I}});
  return oracle::block_diag(a0, -a0);
}

bool verdict_of(const json& doc, const std::string& cls) {
  for (const auto& r : doc["reports"]) {
    if (r["class"] == cls) return r["verdict"].get<bool>();
  }
  FAIL("class not in report: " << cls);
  return false;
}

}  // namespace

TEST_CASE("matrix format round trip is bit-identical") {
  std::mt19937_64 rng(60);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Index n = 1 + k % 6;
    ComplexMatrix m(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        m(i, j) = Complex(u(rng) * std::pow(10.0, static_cast<double>(k % 40) - 20.0), u(rng) / 3.0);
      }
    }
    if (k == 0) m(0, 0) = Complex(5e-324, -0.0);
    if (k == 1) m(0, 0) = Complex(1.7976931348623157e308, 0.1);
    const ComplexMatrix back = io::read_matrix(io::write_matrix(m));
    REQUIRE(back.rows() == n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        CHECK(std::memcmp(&back(i, j), &m(i, j), sizeof(Complex)) == 0);
      }
    }
  }
}

TEST_CASE("matrix format diagnostics") {
  try {
    io::read_matrix("{\"n\": 1,\n  \"entries\": [[1, 2]\n", "m.json");
    FAIL("expected an error");
  } catch (const io::InputError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() >= 1);
    CHECK(std::string(e.what()).find("m.json:3:") == 0);
  }
  try {
    io::read_matrix("{\"n\": 2, \"entries\": [[1, 2], [3, x]]}", "m.json");
    FAIL("expected an error");
  } catch (const io::InputError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 34);
  }
  CHECK_THROWS_AS(io::read_matrix("{\"n\": 2, \"entries\": [[1, 0]]}"), io::InputError);
  CHECK_THROWS_AS(io::read_matrix("{\"n\": 1, \"entries\": [[1]]}"), io::InputError);
  CHECK_THROWS_AS(io::read_matrix("{\"n\": 0, \"entries\": []}"), io::InputError);
  CHECK_THROWS_AS(io::read_matrix("[1, 2]"), io::InputError);
}

TEST_CASE("classify command") {
  auto cop = run({"classify", put("cop.json", oracle::from_rows({{0.0, 0.5}, {-0.5, 0.0}})), "--class", "cop"});
  CHECK(cop.code == cli::kOk);
  json d = cop.doc();
  CHECK(d["schema"] == "idemlab/1");
  CHECK(d["reports"].size() == 1);
  CHECK(verdict_of(d, "cop"));
  CHECK(d["tol"]["eig_cluster"] == 1e-6);

  auto w = run({"classify", put("w.json", W()), "--class", "doi,clos_doi"});
  CHECK(w.code == cli::kOk);
  CHECK_FALSE(verdict_of(w.doc(), "doi"));
  CHECK(verdict_of(w.doc(), "clos_doi"));

  auto zero = run({"classify", put("zero.json", ComplexMatrix::Zero(3, 3))});
  CHECK(zero.code == cli::kOk);
  CHECK(zero.doc()["reports"].size() == 10);
  for (const auto& r : zero.doc()["reports"]) CHECK(r["verdict"].get<bool>());

  // A rejected verdict is still a successful run.
  auto no = run({"classify", put("d12.json", oracle::diag({1.0, 2.0})), "--class", "balanced"});
  CHECK(no.code == cli::kOk);
  CHECK_FALSE(verdict_of(no.doc(), "balanced"));
}

TEST_CASE("input errors exit with 2") {
  auto bad = run({"classify", put_text("bad.json", "{\"n\": 1,\n\"entries\": [[1, 0]\n")});
  CHECK(bad.code == cli::kInputError);
  CHECK(bad.err.find("bad.json:3:") != std::string::npos);
  CHECK(run({"classify", (scratch() / "missing.json").string()}).code == cli::kInputError);
  CHECK(run({"classify", put("ok.json", oracle::diag({1.0})), "--class", "nope"}).code == cli::kInputError);
  CHECK(run({"classify", put("ok.json", oracle::diag({1.0})), "--tol-eig", "-1"}).code == cli::kInputError);
  CHECK(run({"frobnicate"}).code == cli::kInputError);
  CHECK(run({}).code == cli::kInputError);
  CHECK(run({"construct", put("ok.json", oracle::diag({1.0})), "--kind", "weird"}).code == cli::kInputError);
}

TEST_CASE("help exits with 0") {
  auto h = run({"--help"});
  CHECK(h.code == cli::kOk);
  CHECK(h.out.find("classify") != std::string::npos);
}

TEST_CASE("construct and verify round trip") {
  const std::string target = put("pm.json", oracle::diag({1.0, -1.0}));
  const std::string prefix = (scratch() / "pm").string();
  auto c = run({"construct", target, "--kind", "doi", "--out", prefix});
  REQUIRE(c.code == cli::kOk);
  json d = c.doc();
  CHECK(d["status"] == "ok");
  CHECK(d["certificate"]["target_residual"].get<double>() < 1e-12);
  CHECK(fs::exists(prefix + ".left.json"));
  CHECK(fs::exists(prefix + ".right.json"));
  CHECK(json::parse(slurp(prefix + ".summary.json"))["status"] == "ok");

  auto v = run({"verify", "--left", prefix + ".left.json", "--right", prefix + ".right.json",
                "--kind", "doi", "--target", target});
  CHECK(v.code == cli::kOk);
  CHECK(v.doc()["pass"].get<bool>());

  // Perturbing the left factor breaks idempotency.
  std::mt19937_64 rng(61);
  ComplexMatrix left = io::read_matrix_file(prefix + ".left.json");
  left += 1e-2 * oracle::gaussian(2, 2, rng);
  const std::string bent = put("bent.json", left);
  auto f = run({"verify", "--left", bent, "--right", prefix + ".right.json", "--kind", "doi",
                "--target", target});
  CHECK(f.code == cli::kVerifyFailed);
  CHECK_FALSE(f.doc()["pass"].get<bool>());
  CHECK(f.doc()["structure"]["left_idempotent_defect"].get<double>() > 1e-4);
}

TEST_CASE("approximant construction and verification") {
  const std::string t0 = put("t0.json", T0());
  const std::string prefix = (scratch() / "t0").string();
  auto c = run({"construct", t0, "--kind", "coi-approx", "--eps", "1e-2", "--out", prefix, "--seed", "3"});
  REQUIRE(c.code == cli::kOk);
  CHECK(c.doc()["certificate"]["target_residual"].get<double>() < 1e-2);
  CHECK(c.doc()["seed"] == 3);
  auto v = run({"verify", "--left", prefix + ".left.json", "--right", prefix + ".right.json",
                "--kind", "coi-approx", "--target", t0, "--eps", "1e-2"});
  CHECK(v.code == cli::kOk);

  auto w = run({"construct", put("w.json", W()), "--kind", "doi-approx", "--eps", "1e-3"});
  REQUIRE(w.code == cli::kOk);
  const ComplexMatrix g = io::matrix_from_json(w.doc()["left"]);
  const ComplexMatrix h = io::matrix_from_json(w.doc()["right"]);
  CHECK(oracle::norm2(g - h - W()) < 1e-3);
}

TEST_CASE("construct rejections exit with 3") {
  auto r = run({"construct", put("d12.json", oracle::diag({1.0, 2.0})), "--kind", "coi-approx"});
  CHECK(r.code == cli::kRejected);
  json d = r.doc();
  CHECK(d["status"] == "rejected");
  CHECK(d["report"]["class"] == "clos_coi");
  CHECK_FALSE(d["report"]["verdict"].get<bool>());

  CHECK(run({"construct", put("t0.json", T0()), "--kind", "coi"}).code == cli::kRejected);
  CHECK(run({"construct", put("w.json", W()), "--kind", "doi"}).code == cli::kRejected);
}

TEST_CASE("projection certificates") {
  const std::string t = put("cop.json", oracle::from_rows({{0.0, 0.5}, {-0.5, 0.0}}));
  const std::string prefix = (scratch() / "cop").string();
  REQUIRE(run({"construct", t, "--kind", "cop", "--out", prefix}).code == cli::kOk);
  CHECK(run({"verify", "--left", prefix + ".left.json", "--right", prefix + ".right.json", "--kind",
             "cop", "--target", t})
            .code == cli::kOk);
  // An idempotent that is not hermitian fails the projection check.
  const std::string skew = put("skew.json", oracle::from_rows({{1.0, 1.0}, {0.0, 0.0}}));
  auto v = run({"verify", "--left", skew, "--right", prefix + ".right.json", "--kind", "cop"});
  CHECK(v.code == cli::kVerifyFailed);
  CHECK(v.doc()["structure"]["left_hermitian_defect"].get<double>() > 0.5);
}

TEST_CASE("verify shape mismatch exits with 2") {
  auto v = run({"verify", "--left", put("a2.json", oracle::diag({1.0, 0.0})), "--right",
                put("a3.json", oracle::diag({1.0, 0.0, 0.0})), "--kind", "doi"});
  CHECK(v.code == cli::kInputError);
}

TEST_CASE("sweep command") {
  auto s = run({"sweep", "--dims", "4,8,16", "--eps", "1e-3", "--json"});
  REQUIRE(s.code == cli::kOk);
  json rows = s.doc()["rows"];
  CHECK(rows.size() == 3);
  for (const auto& r : rows) CHECK(r["residual"].get<double>() < 1e-3);

  CHECK(run({"sweep", "--unpaired", "--dims", "4"}).code == cli::kInputError);

  auto empty = run({"sweep"});
  CHECK(empty.code == cli::kOk);
  CHECK(empty.out == "n,residual,cond,seed\r\n");

  const std::string a = (scratch() / "a.csv").string();
  const std::string b = (scratch() / "b.csv").string();
  REQUIRE(run({"sweep", "--dims", "4,8", "--seed", "9", "--out", a}).code == cli::kOk);
  REQUIRE(run({"sweep", "--dims", "4,8", "--seed", "9", "--out", b}).code == cli::kOk);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("n,residual,cond,seed\r\n4,", 0) == 0);

  CHECK(run({"sweep", "--decay", "cubic", "--dims", "4"}).code == cli::kInputError);
  CHECK(run({"sweep", "--param", "2", "--dims", "4"}).code == cli::kInputError);
}

TEST_CASE("tolerance profile from the environment") {
  const std::string m = put("one.json", oracle::diag({1.0}));
  ::setenv("IDEMLAB_TOL_PROFILE", "loose", 1);
  auto loose = run({"classify", m, "--class", "balanced"});
  ::setenv("IDEMLAB_TOL_PROFILE", "strict", 1);
  auto strict = run({"classify", m, "--class", "balanced"});
  auto flag = run({"classify", m, "--class", "balanced", "--tol-eig", "1e-5"});
  ::setenv("IDEMLAB_TOL_PROFILE", "bogus", 1);
  auto bogus = run({"classify", m});
  ::unsetenv("IDEMLAB_TOL_PROFILE");
  REQUIRE(loose.code == cli::kOk);
  REQUIRE(strict.code == cli::kOk);
  const double el = loose.doc()["tol"]["eig_cluster"].get<double>();
  const double es = strict.doc()["tol"]["eig_cluster"].get<double>();
  CHECK(el == tolerance_preset("loose").eig_cluster);
  CHECK(es == tolerance_preset("strict").eig_cluster);
  CHECK(flag.doc()["tol"]["eig_cluster"].get<double>() == 1e-5);
  CHECK(flag.doc()["tol"]["rank_rel"].get<double>() == tolerance_preset("strict").rank_rel);
  CHECK(bogus.code == cli::kInputError);
}
