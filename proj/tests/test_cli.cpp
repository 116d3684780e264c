#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "pfc/spectra.hpp"

using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "pfc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = pfc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("pfc_cli_test_" + name)).string();
}

std::string write_file(const std::string& name, const std::string& text) {
  std::string path = temp_path(name);
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("matrix on the default map") {
  Result r = run({"matrix"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["schema"] == "1");
  CHECK(j["reproduced"] == true);
  CHECK(j["factorization"] == "x^2*(x-1)*(x-2/3)*(x^2+1/3*x-1/3)");
  CHECK(j["matrix"][3] == json({"1/3", "2/3", "0", "0", "0", "0"}));
  CHECK(j["v2"]["vector"] ==
        json({"1", "(3+sqrt(13))/2", "(-5-sqrt(13))/2", "(-5-sqrt(13))/2", "(3+sqrt(13))/2", "1"}));
  std::vector<std::string> exact;
  for (const auto& e : j["eigenvalues"])
    for (int k = 0; k < e["mult"].get<int>(); ++k) exact.push_back(e["exact"]);
  CHECK(exact == std::vector<std::string>{"1", "(-1-sqrt(13))/6", "2/3", "(-1+sqrt(13))/6", "0", "0"});

  Result csv = run({"matrix", "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("2/3,1/3,0/1", 0) == 0);
}

TEST_CASE("matrix on other maps") {
  Result d = run({"matrix", "--map", "doubling"});
  REQUIRE(d.code == 0);
  json j = json::parse(d.out);
  CHECK(j["matrix"] == json::array({json::array({"1"})}));
  CHECK(j["eigenvalues"].size() == 1);
  CHECK(j["eigenvalues"][0]["exact"] == "1");
  CHECK(j["reference"] == "none");

  std::string path = write_file("odd_lift.json", R"({"p": 2, "breaks": ["0/1", "1/7", "2/1"], "slopes": ["3/5", "32/65"]})");
  CHECK(run({"matrix", "--map", path}).code == 2);
  CHECK(run({"matrix", "--map", "no_such_map"}).code == 2);
  std::string bad = write_file("bad_lift.json", R"({"p": 2, "breaks": ["0/1", "2/1"], "slopes": ["1/3"]})");
  CHECK(run({"matrix", "--map", bad}).code == 2);
}

TEST_CASE("ly") {
  Result r = run({"ly"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["constants"]["M"] == 15);
  CHECK(j["constants"]["D"] == "12");
  CHECK(j["suite"]["violations"] == 0);
  CHECK(j["seed"] == 13);
  CHECK(j["orbits"]["step_eigenfunction"].size() == 10);
  CHECK(run({"ly", "--kappa", "0.6"}).code == 2);
  CHECK(run({"ly", "--kappa", "abc"}).code == 2);
  Result csv = run({"ly", "--format", "csv"});
  CHECK(csv.out.rfind("N,sup_g,D,atoms\n1,2/3,12,", 0) == 0);
}

TEST_CASE("spectrum") {
  Result r = run({"spectrum", "--delta", "0.1", "--N", "65", "--k-max", "2"});
  CHECK(r.code == 1);  // |lambda_delta| is far below 0.75 at this width
  json j = json::parse(r.out);
  CHECK(j["schema"] == "1");
  CHECK(j["chain"] == false);
  CHECK(j["converged"] == true);
  CHECK(j["lambda_delta"]["re"].get<double>() < 0);
  Result again = run({"spectrum", "--delta", "0.1", "--N", "65", "--k-max", "2"});
  CHECK(again.out == r.out);

  CHECK(run({"spectrum", "--delta", "0"}).code == 2);
  CHECK(run({"spectrum", "--delta", "-0.1"}).code == 2);
  CHECK(run({"spectrum", "--N", "64"}).code == 2);
  CHECK(run({"spectrum", "--N", "65", "--delta", "0.1", "--newton-tol", "0"}).code == 2);
  Result csv = run({"spectrum", "--delta", "0.1", "--N", "65", "--k-max", "2", "--format", "csv"});
  CHECK(csv.out.rfind("index,re,im,abs,residual,converged\n", 0) == 0);
}

TEST_CASE("sweep") {
  Result r = run({"sweep", "--delta-sweep", "0.1:0.1:1", "--N", "65", "--n-cap", "257", "--format", "csv"});
  CHECK(r.code == 1);
  CHECK(r.out.rfind("delta,re_lambda,im_lambda,abs_lambda,gap,ess_bound,N_used,converged,outside_0.7\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 2);
  CHECK(run({"sweep", "--delta-sweep", "0.1:0.01"}).code == 2);
  CHECK(run({"sweep", "--delta-sweep", "0.1:0.01:3"}).code == 2);
  CHECK(run({"sweep", "--delta-sweep", "0:0.1:3"}).code == 2);
  CHECK(run({"sweep", "--N", "65", "--n-cap", "33"}).code == 2);
}

TEST_CASE("approx") {
  Result r = run({"approx", "--delta", "0.1"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE(j["rows"].size() == 10);
  CHECK(j["rows"][0]["function"] == "one");
  CHECK(j["rows"][0]["lhs"].get<double>() < 1e-10);
  for (const auto& row : j["rows"]) CHECK(row["holds"] == true);
  CHECK(run({"approx", "--delta", "1"}).code == 2);
  CHECK(run({"approx", "--delta", "0"}).code == 2);
  Result again = run({"approx", "--delta", "0.1"});
  CHECK(again.out == r.out);
}

TEST_CASE("eigenfunction") {
  Result r = run({"eigenfunction", "--delta", "0.1", "--N", "65"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["coefficients"].size() == 65);
  CHECK(j["residual"].get<double>() < 1e-9);

  CHECK(run({"eigenfunction", "--delta", "0.1", "--N", "65", "--format", "bin"}).code == 2);
  std::string path = temp_path("modes.bin");
  Result b = run({"eigenfunction", "--delta", "0.1", "--N", "65", "--format", "bin", "--out", path});
  REQUIRE(b.code == 0);
  std::ifstream in(path, std::ios::binary);
  double delta = 0;
  pfc::Complex target;
  auto c = pfc::read_mode_dump(in, &delta, &target);
  CHECK(c.size() == 65);
  CHECK(delta == 0.1);
  CHECK(target.real() == doctest::Approx(j["value"]["re"].get<double>()));

  Result one = run({"eigenfunction", "--delta", "0.1", "--N", "65", "--target", "1,0"});
  REQUIRE(one.code == 0);
  json jo = json::parse(one.out);
  CHECK(jo["coefficients"][32][0] == 0);
  CHECK(jo["coefficients"][32][1].get<double>() == doctest::Approx(1.0));
  CHECK(jo["decay"].is_null());
  CHECK(run({"eigenfunction", "--target", "x"}).code == 2);
}

TEST_CASE("map-info") {
  Result r = run({"map-info", "--k-max", "3"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["markov"]["q"] == 6);
  CHECK(j["critical_images"] == json({"0", "1/6", "1/3", "1/2", "2/3", "5/6"}));
  CHECK(j["expansion"][0]["inf_derivative"] == "3/2");
  CHECK(j["singular_set"].size() == 12);
}

TEST_CASE("config files") {
  std::string cfg = write_file("cfg.json", R"({"map": "doubling", "format": "csv"})");
  Result r = run({"matrix", "--config", cfg});
  CHECK(r.code == 0);
  CHECK(r.out == "1/1\n");
  Result over = run({"matrix", "--config", cfg, "--format", "json"});
  CHECK(json::parse(over.out)["q"] == 1);

  std::string unknown = write_file("unknown.json", R"({"delta": 0.1, "colour": "red"})");
  Result u = run({"spectrum", "--config", unknown});
  CHECK(u.code == 2);
  CHECK(u.err.find("colour") != std::string::npos);
  std::string typed = write_file("typed.json", R"({"delta": "small"})");
  CHECK(run({"spectrum", "--config", typed}).code == 2);
  std::string broken = write_file("broken.json", "{");
  CHECK(run({"matrix", "--config", broken}).code == 2);
  CHECK(run({"matrix", "--config", temp_path("missing.json")}).code == 2);

  std::string lift = write_file("inline.json", R"({"map": {"p": 2, "breaks": ["0/1", "2/1"], "slopes": ["1/2"]}})");
  CHECK(json::parse(run({"matrix", "--config", lift}).out)["q"] == 1);

  std::string out = temp_path("matrix_out.csv");
  CHECK(run({"matrix", "--format", "csv", "--out", out}).code == 0);
  std::ifstream in(out);
  std::string first;
  std::getline(in, first);
  CHECK(first == "2/3,1/3,0/1,0/1,0/1,0/1");
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"matrix", "--no-such-flag"}).code == 2);
  CHECK(run({"matrix", "--format", "xml"}).code == 2);
  Result help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("sweep") != std::string::npos);
}
