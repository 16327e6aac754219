#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "reslat/model.hpp"

using namespace reslat;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "reslat");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

Complex cplx(const json& j) { return {j.at("re").get<double>(), j.at("im").get<double>()}; }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("reslat_test_" + name);
}

}  // namespace

TEST_CASE("turning-points") {
  const Run r = run({"turning-points", "--E", "2", "--nu", "0.5"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["command"] == "turning-points");
  const TurningPoints tp = turning_points(2.0, 0.5);
  const double quoted[] = {0.2587, 1.267, 1.526};
  for (int i = 0; i < 3; ++i) {
    const Complex rr = cplx(j["rows"][i]["r"]);
    CHECK(rr == tp.r[i]);
    CHECK(std::abs(rr.real() - quoted[i]) < 1e-3);
    CHECK(j["rows"][i]["residual_r"].get<double>() < 1e-12);
  }
  CHECK(j["rows"][0]["degenerate"] == false);
  const json d = json::parse(run({"turning-points", "--E", "2", "--nu", "0"}).out);
  CHECK(d["rows"][0]["degenerate"] == true);

  const Run csv = run({"turning-points", "--E", "2", "--nu", "0.5", "--format", "csv"});
  CHECK(csv.out.substr(0, csv.out.find('\n')) ==
        "j,x_re,x_im,r_re,r_im,g_sign,residual_x,residual_r,D3_re,D3_im,degenerate");
}

TEST_CASE("actions") {
  const json j = json::parse(run({"actions", "--E", "1", "--nu", "0.01", "--h", "0.01", "--l", "1"}).out);
  REQUIRE(j["rows"].size() == 4);
  CHECK(j["rows"][0]["name"] == "S01");
  CHECK(std::abs(cplx(j["rows"][0]["value"]) - Complex(0.0, 0.650829076510541)) < 1e-10);
  CHECK(j["rows"][0]["est_error"].get<double>() < 1e-9);
  CHECK(j["rows"][3]["name"] == "S12");
  CHECK(run({"actions", "--E", "1", "--E-im", "0.1", "--nu", "0.01", "--h", "0.01"}).code == 2);
}

TEST_CASE("resonances: lattice, refinement, determinism") {
  const Run lat = run({"resonances", "--h", "0.01", "--band", "1,4", "--refine", "lattice"});
  REQUIRE(lat.code == 0);
  const json jl = json::parse(lat.out);
  const double n = 3.0 / (1.5 * kPi * 0.01);
  CHECK(std::abs(static_cast<double>(jl["rows"].size()) - std::floor(n)) <= 1.0);
  for (const auto& row : jl["rows"]) {
    CHECK(row["method"] == "lattice");
    CHECK(row["iterations"] == 0);
    CHECK(cplx(row["lambda"]) == lattice_lambda(row["k"].get<int>(), 0.5, 0.01));
  }

  const std::vector<std::string> bs{"resonances", "--h", "0.02", "--nutilde-max", "2.5", "--band",
                                    "2,2.6",      "--refine", "bs", "--format", "csv"};
  auto one = bs, four = bs;
  one.insert(one.end(), {"--threads", "1"});
  four.insert(four.end(), {"--threads", "4"});
  const Run a = run(one), b = run(four);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("bs-newton") != std::string::npos);

  const json jb = json::parse(run({"resonances", "--h", "0.02", "--band", "2,2.3", "--refine", "bs"}).out);
  for (const auto& row : jb["rows"]) {
    CHECK(row["error"] == "");
    CHECK(row["residual"].get<double>() <= 1e-10);
    CHECK(cplx(row["lambda"]).imag() < 0.0);
  }
}

TEST_CASE("resonances: seed file and ODE refinement") {
  const auto path = temp_file("seeds.json");
  {
    std::ofstream f(path);
    f << R"([{"re": 1.62, "im": -0.01}, 1.65])";
  }
  const Run r = run({"resonances", "--h", "0.01", "--refine", "bs", "--seed-file", path.string()});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j["rows"].size() == 2);
  for (const auto& row : j["rows"]) {
    const int k = row["k"];
    CHECK(nearest_branch(bs_condition(cplx(row["E"]), 0.01, 0.5).A) == k);
  }
  std::filesystem::remove(path);
  CHECK(run({"resonances", "--h", "0.01", "--seed-file", "/nonexistent.json", "--refine", "bs"}).code == 2);

  const Run o = run({"resonances", "--h", "0.1", "--band", "2.0,2.2", "--refine", "ode"});
  REQUIRE(o.code == 0);
  const json jo = json::parse(o.out);
  REQUIRE(jo["rows"].size() >= 1);
  CHECK(jo["rows"][0]["method"] == "ode-oracle");
  CHECK(jo["rows"][0]["error"] == "");
}

TEST_CASE("resonances: figure data fan") {
  const auto data = temp_file("fig.csv"), script = temp_file("fig.gp");
  const Run r = run({"resonances", "--h-range", "0.001,1,4", "--k-range", "11,60", "--nutilde-min", "1.5",
                     "--nutilde-max", "5.5", "--figure-data", data.string(), "--figure-script", script.string(),
                     "--format", "csv"});
  REQUIRE(r.code == 0);
  std::ifstream f(data);
  std::string line;
  std::getline(f, line);
  CHECK(line == "nu_tilde,h,k,lambda_re,lambda_im");
  std::map<std::pair<double, int>, std::vector<std::pair<double, double>>> by_hk;
  int rows = 0;
  while (std::getline(f, line)) {
    std::istringstream s(line);
    double nt, h, re, im;
    int k;
    char c;
    s >> nt >> c >> h >> c >> k >> c >> re >> c >> im;
    by_hk[{h, k}].push_back({nt, std::abs(im)});
    ++rows;
  }
  CHECK(rows == 4 * 50 * 5);
  for (const auto& [key, v] : by_hk) {
    REQUIRE(v.size() == 5);
    for (std::size_t i = 1; i < v.size(); ++i) {
      CHECK(v[i].first > v[i - 1].first);
      CHECK(v[i].second < v[i - 1].second);
    }
  }
  std::ifstream g(script);
  std::getline(g, line);
  CHECK(line == "set datafile separator ','");
  std::filesystem::remove(data);
  std::filesystem::remove(script);
}

TEST_CASE("verify-ode and pplus") {
  const Run v = run({"verify-ode", "--h", "0.1", "--nutilde", "0.5", "--k", "4"});
  REQUIRE(v.code == 0);
  const json j = json::parse(v.out)["rows"][0];
  CHECK(j["winding"] == 1);
  CHECK(j["ode_bs_gap_over_h"].get<double>() < 0.01);

  const Run p = run({"pplus", "--h", "0.01", "--l", "2", "--kmax", "3", "--oracle"});
  CHECK(p.code == 4);
  const json jp = json::parse(p.out);
  REQUIRE(jp["rows"].size() == 3);
  CHECK(jp["rows"][0]["k"] == 1);
  CHECK(jp["rows"][0]["bs_residual"].is_null());
  CHECK(std::abs(jp["rows"][2]["delta"].get<double>()) < 0.01);
  // the lowest level of each l lies outside the three-real-turning-point regime: partial
  CHECK(run({"pplus", "--h", "0.01", "--l", "1", "--kmax", "1"}).code == 4);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 2);
  CHECK(run({"resonances", "--bogus"}).code == 2);
  CHECK(run({"resonances", "--h", "0.01", "--nutilde-max", "1.0"}).code == 2);
  CHECK(run({"resonances", "--h", "0.01", "--band", "2,2.0001"}).code == 3);
  CHECK(run({"pplus", "--h", "0.01", "--l", "0"}).code == 2);
  CHECK(run({"turning-points", "--E", "2", "--nu", "0.5", "--format", "xml"}).code == 2);
}
