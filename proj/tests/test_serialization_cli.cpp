#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "actplace/serialization.hpp"
#include "actplace/verify.hpp"
#include "commands.hpp"

using namespace actplace;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("actplace_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::vector<std::string> csv_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  return rows;
}

std::vector<std::string> split(const std::string& row) {
  std::vector<std::string> cells;
  std::stringstream in(row);
  for (std::string cell; std::getline(in, cell, ',');) cells.push_back(cell);
  if (!row.empty() && row.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

TEST_CASE("reals and matrices round-trip losslessly") {
  for (const double x : {0.1, 1.0 / 3.0, 8.517536883598281e7, 5e-324, -2.5e300}) CHECK(real_from_json(Json::parse(real_to_json(x).dump())) == x);
  CHECK(real_to_json(std::numeric_limits<double>::infinity()).is_null());
  CHECK(std::isinf(real_from_json(Json(nullptr))));
  Matrix m(2, 3);
  m << 1.0 / 3, 2, 3, 4, 5, 6e-17;
  CHECK(matrix_from_json(Json::parse(matrix_to_json(m).dump())) == m);
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("system descriptors resolve") {
  CHECK(system_from_descriptor({{"type", "chain"}, {"n", 4}}).a() == chain_network(4).a());
  CHECK(system_from_descriptor({{"type", "er"}, {"n", 6}, {"seed", 3}}).a() == erdos_renyi_system({6, 3}).system.a());
  const LinearSystem hs = system_from_descriptor({{"type", "hitting_set"}, {"m", 1}, {"sets", {{1}}}});
  CHECK(hs.n() == 3);
  const LinearSystem sys = chain_network(3, InfiniteHorizon{});
  CHECK(system_from_json(system_to_json(sys)).a() == sys.a());
  CHECK_FALSE(system_from_json(system_to_json(sys)).is_finite_horizon());
  CHECK_THROWS_AS(system_from_descriptor({{"type", "nope"}}), Error);
  CHECK_THROWS_AS(system_from_descriptor(Json::array()), Error);
}

TEST_CASE("Gramian caches round-trip and detect corruption") {
  const auto g = finite_horizon_node_gramians(chain_network(4));
  Json doc = Json::parse(gramians_to_json(g, {{"type", "chain"}, {"n", 4}}).dump());
  CHECK(doc["format"] == gramian_cache_format);
  const auto back = gramians_from_json(doc);
  CHECK(back.method() == g.method());
  for (int i = 0; i < 4; ++i) CHECK(back.node(i) == g.node(i));
  doc["per_node"][1][1][1] = doc["per_node"][1][1][1].get<double>() + 1e-6;
  CHECK_THROWS_AS(gramians_from_json(doc), Error);
}

TEST_CASE("placement results and run records round-trip") {
  const auto g = finite_horizon_node_gramians(chain_network(5));
  const double E = energy_metric(g, ActuatorSet::from_one_based(5, {1, 5}), 0.0);
  RunRecord rec;
  rec.instance = {{"type", "chain"}, {"n", 5}};
  rec.n = 5;
  rec.solver = "bounded-energy-bisection";
  rec.parameters = {{"E", E}};
  rec.gramian_method = to_string(g.method());
  rec.placement = min_actuators_bounded_energy(g, E, 1e-4, 1e-4);
  rec.oracle = brute_force_min_actuators(g, E);
  rec.wall_time_s = 0.25;
  const Json once = to_json(rec);
  const RunRecord back = run_record_from_json(Json::parse(once.dump()));
  CHECK(to_json(back) == once);
  CHECK(back.placement->delta == rec.placement->delta);
  CHECK(back.placement->metric_exact == rec.placement->metric_exact);
  CHECK(back.placement->iterations.size() == rec.placement->iterations.size());
  CHECK(back.oracle->optimal_set == rec.oracle->optimal_set);
}

TEST_CASE("cli: exit codes") {
  CHECK(invoke(std::vector<std::string>{}).code == cli::exit_invalid);
  CHECK(invoke({"place-min", "--chain", "5"}).code == cli::exit_invalid);  // no E
  CHECK(invoke({"place-min", "--chain", "5", "--E", "1"}).code == cli::exit_infeasible);
  CHECK(invoke({"place-min", "--chain", "5", "--E", "1"}).err.find("12.00847") != std::string::npos);
  CHECK(invoke({"place-min", "--chain", "5", "--E", "100", "--c", "-1"}).code == cli::exit_invalid);
  CHECK(invoke({"place-min", "--instance", "/nonexistent.json", "--E", "100"}).code == cli::exit_invalid);
  CHECK(invoke({"gramians", "--er", "5", "--method", "sideways"}).code == cli::exit_invalid);
  CHECK(invoke({"place-budget", "--chain", "5", "--r", "1", "--delta-c", "2"}).code == cli::exit_invalid);
  CHECK(invoke({"--version"}).code == cli::exit_ok);
  // an unstable A on the infinite horizon
  TempDir tmp;
  write_text_file(tmp.file("unstable.json"), R"({"n":2,"A":[[1,0],[0,-1]],"horizon":{"type":"infinite"}})");
  const Run r = invoke({"gramians", "--instance", tmp.file("unstable.json")});
  CHECK(r.code == cli::exit_invalid);
  CHECK(r.err.find("rightmost") != std::string::npos);
  CHECK(cli::exit_code_for(ErrorKind::certification) == cli::exit_certification);
}

TEST_CASE("cli: chain runs through a Gramian cache") {
  TempDir tmp;
  const std::string cache = tmp.file("chain.json");
  REQUIRE(invoke({"gramians", "--chain", "5", "--out", cache}).code == 0);
  const auto g = gramians_from_json(read_json_file(cache));
  CHECK(energy_metric(g, ActuatorSet::all(5), 0.0) <= 2.4209e3);

  const Run pm = invoke({"place-min", "--gramians", cache, "--E", "3.3594e5"});
  REQUIRE(pm.code == 0);
  const Json rec = Json::parse(pm.out);
  CHECK(rec["placement"]["delta"] == Json({1, 3}));
  CHECK(rec["solver"] == "bounded-energy-bisection");

  const Run pb = invoke({"place-budget", "--gramians", cache, "--r", "3"});
  REQUIRE(pb.code == 0);
  CHECK(Json::parse(pb.out)["placement"]["metric_exact"].get<double>() == doctest::Approx(81.7134).epsilon(1e-3));

  const Run brute = invoke({"place-budget", "--gramians", cache, "--r", "2", "--solver", "brute"});
  CHECK(Json::parse(brute.out)["oracle"]["optimal_set"] == Json({1, 3}));
}

TEST_CASE("cli: A = 0 inline descriptor gives unit Gramians") {
  TempDir tmp;
  write_text_file(tmp.file("zero.json"), R"({"type":"inline","n":2,"A":[[0,0],[0,0]],"horizon":{"type":"finite","t0":0,"t1":1}})");
  const Run r = invoke({"gramians", "--instance", tmp.file("zero.json")});
  REQUIRE(r.code == 0);
  const auto g = gramians_from_json(Json::parse(r.out));
  CHECK(g.node(0) == (Matrix(2, 2) << 1, 0, 0, 0).finished());
  CHECK(g.node(1) == (Matrix(2, 2) << 0, 0, 0, 1).finished());
}

TEST_CASE("cli: Erdos-Renyi cache carries Lyapunov residuals") {
  const Run r = invoke({"gramians", "--er", "10", "--seed", "1"});
  REQUIRE(r.code == 0);
  const Json doc = Json::parse(r.out);
  CHECK(doc["method_tag"] == "infinite-horizon");
  CHECK(doc["max_residual"].get<double>() <= 1e-8);
  CHECK(doc["residuals"].size() == 10);
}

TEST_CASE("cli: sweeps are schema-stable and monotone on the chain") {
  const Run pm = invoke({"place-min", "--chain", "5", "--sweep", "12"});
  REQUIRE(pm.code == 0);
  const auto rows = csv_rows(pm.out);
  REQUIRE(rows.size() == 13);
  CHECK(rows[0] == "n,k,E,status,cardinality,delta,metric_exact,metric_eps,eps,bound_F,controllable");
  int previous = 1 << 30;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    REQUIRE(cells.size() == 11);
    REQUIRE(cells[3] == "ok");
    const int card = std::stoi(cells[4]);
    CHECK(card <= previous);
    previous = card;
  }

  const Run pb = invoke({"place-budget", "--chain", "5", "--sweep", "5"});
  REQUIRE(pb.code == 0);
  const auto brows = csv_rows(pb.out);
  REQUIRE(brows.size() == 6);
  CHECK(brows[0] == "n,r,status,cardinality,delta,metric_exact,E_used,controllable");
  CHECK(split(brows[3])[4] == "1;3;4");
}

TEST_CASE("cli: config file sits between flags and defaults") {
  TempDir tmp;
  const std::string cfg = tmp.file("run.toml");
  write_text_file(cfg, "[place-min]\nc = 0.5\na0 = 0.25\nE = 3.3594e5\n");
  const Run from_file = invoke({"--config", cfg, "place-min", "--chain", "5"});
  REQUIRE(from_file.code == 0);
  const Json p = Json::parse(from_file.out)["parameters"];
  CHECK(p["c"] == 0.5);
  CHECK(p["a0"] == 0.25);
  const Run flag_wins = invoke({"--config", cfg, "place-min", "--chain", "5", "--c", "0.125"});
  REQUIRE(flag_wins.code == 0);
  CHECK(Json::parse(flag_wins.out)["parameters"]["c"] == 0.125);
  const Run defaults = invoke({"place-min", "--chain", "5", "--E", "3.3594e5"});
  CHECK(Json::parse(defaults.out)["parameters"]["c"] == 1e-4);
  CHECK(Json::parse(defaults.out)["parameters"]["a0"] == 1e-4);
}

TEST_CASE("cli: verify reports pass per suite") {
  const Run r = invoke({"verify", "--chain", "5", "--suite", "supermodularity", "--triples", "200"});
  REQUIRE(r.code == 0);
  const Json doc = Json::parse(r.out);
  CHECK(doc["suites"][0]["checks"] == 200);
  // The chain is not supermodular: a 50-digit evaluation of a = 1, {3} within {3,5}
  // at the default eps gives slack -6.0496758933911e-5. The report must dump it.
  const Run pinned = invoke({"verify", "--chain", "5", "--suite", "supermodularity", "--triples", "1000"});
  const Json suite = Json::parse(pinned.out)["suites"][0];
  CHECK(Json::parse(pinned.out)["passed"] == false);
  bool found = false;
  for (const auto& f : suite["failures"])
    if (f["a"] == 1 && f["delta1"] == Json({3}) && f["delta2"] == Json({3, 5})) {
      found = true;
      CHECK(f["slack"].get<double>() == doctest::Approx(-6.0496758933911e-5).epsilon(1e-8));
    }
  CHECK(found);

  TempDir tmp;
  write_text_file(tmp.file("stable.json"), R"({"n":3,"A":[[-2,0.3,0],[0.1,-1.5,0.2],[0,0.4,-1]],"horizon":{"type":"infinite"}})");
  const Json ok = Json::parse(invoke({"verify", "--instance", tmp.file("stable.json"), "--suite", "supermodularity"}).out);
  CHECK(ok["suites"][0]["checks"].get<int>() > 0);

  const Run fact2 = invoke({"verify", "--chain", "5", "--suite", "fact2", "--r", "2", "--l", "2"});
  REQUIRE(fact2.code == 0);
  CHECK(Json::parse(fact2.out)["suites"][0]["details"].contains("bound"));

  const Run big = invoke({"verify", "--er", "13", "--suite", "oracle"});
  CHECK(big.code == cli::exit_invalid);
}

TEST_CASE("cli: repeated runs are identical apart from timing") {
  auto strip = [](Json j) {
    j.erase("wall_time_s");
    return j;
  };
  const Run a = invoke({"place-min", "--er", "8", "--seed", "4", "--E-factor", "16", "--lazy"});
  const Run b = invoke({"place-min", "--er", "8", "--seed", "4", "--E-factor", "16", "--lazy"});
  REQUIRE(a.code == 0);
  CHECK(strip(Json::parse(a.out)) == strip(Json::parse(b.out)));
}
