#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("gsf_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int gsf(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + GSF_BINARY + " " + args + " > " + (workdir() / "stdout.txt").string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string out(const std::string& name) { return (workdir() / name).string(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

void write_file(const std::string& name, const std::string& content) { std::ofstream(workdir() / name) << content; }

const char* kStar8 = R"({"qubits": 8, "ops": [
  {"op": "epr", "pair": [0, 1]}, {"op": "epr", "pair": [2, 3]}, {"op": "epr", "pair": [4, 5]},
  {"op": "epr", "pair": [6, 7]}, {"op": "fuse", "pairs": [[0, 1], [2, 3]]},
  {"op": "fuse", "pairs": [[4, 5], [6, 7]]}, {"op": "fuse", "pairs": [[0, 1], [4, 5]]}]})";

const char* kPath4 = R"({"qubits": 4, "ops": [
  {"op": "epr", "pair": [0, 1]}, {"op": "epr", "pair": [2, 3]},
  {"op": "fuse", "pairs": [[0, 1], [2, 3]], "variant": "shifter"}]})";

}  // namespace

TEST_CASE("outcomes command matches the reference pattern") {
  REQUIRE(gsf("outcomes --out " + out("o1")) == 0);
  const std::string csv = slurp(out("o1") + "/outcomes.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
  const json m = read_json(out("o1") + "/manifest.json");
  CHECK(m.at("command") == "outcomes");
  CHECK(m.at("summary").at("max_abs_diff").get<double>() < 1e-9);
  CHECK(m.at("options").at("seed") == 1);
}

TEST_CASE("tolerance violation exits with 2") {
  CHECK(gsf("outcomes --tol 1e-30 --out " + out("o2")) == 2);
  CHECK(read_json(out("o2") + "/manifest.json").at("exit_code") == 2);
}

TEST_CASE("configuration errors exit with 3") {
  write_file("bad.json", R"({"nonexistent": 1})");
  CHECK(gsf("outcomes --config " + out("bad.json") + " --out " + out("o3")) == 3);
  CHECK(gsf("outcomes --variant sideways --out " + out("o3")) == 3);
  CHECK(gsf("grow --out " + out("o3")) == 3);
  CHECK(gsf("fidelity-scan --axes omega9,omega1 --out " + out("o3")) == 3);
  write_file("order.json", R"({"order": [0, 1]})");
  CHECK(gsf("plan --target path4 --order " + out("order.json") + " --out " + out("o3")) == 3);
}

TEST_CASE("monte carlo columns and thread independence") {
  REQUIRE(gsf("outcomes --mc 4000 --seed 7 --out " + out("mc1"), "GSF_THREADS=1") == 0);
  REQUIRE(gsf("outcomes --mc 4000 --seed 7 --out " + out("mc2"), "GSF_THREADS=3") == 0);
  const std::string a = slurp(out("mc1") + "/outcomes.csv");
  CHECK(a.find("mc_probability") != std::string::npos);
  CHECK(a == slurp(out("mc2") + "/outcomes.csv"));
}

TEST_CASE("manifest reproduces byte-identical output") {
  REQUIRE(gsf("outcomes --mc 3000 --seed 11 --variant shifter --out " + out("r1")) == 0);
  json options = read_json(out("r1") + "/manifest.json").at("options");
  options["out"] = out("r2");
  write_file("rerun.json", options.dump());
  REQUIRE(gsf("outcomes --config " + out("rerun.json")) == 0);
  CHECK(slurp(out("r1") + "/outcomes.csv") == slurp(out("r2") + "/outcomes.csv"));
}

TEST_CASE("grow with loss logs resets and stays exact") {
  write_file("star8.json", kStar8);
  bool saw_reset = false;
  for (int seed = 1; seed <= 20 && !saw_reset; ++seed) {
    const std::string dir = out("g" + std::to_string(seed));
    REQUIRE(gsf("grow --script " + out("star8.json") + " --p-loss 0.1 --seed " + std::to_string(seed) + " --out " + dir) == 0);
    const json v = read_json(dir + "/verdict.json");
    CHECK(v.at("ok") == true);
    CHECK(v.at("stats").at("local_unitaries") == 0);
    CHECK(v.at("stats").at("corrupted") == 0);
    saw_reset = slurp(dir + "/session.jsonl").find("\"reset_loss\"") != std::string::npos;
  }
  CHECK(saw_reset);
}

TEST_CASE("grow shifter script gives a dense-checked path") {
  write_file("path4.json", kPath4);
  REQUIRE(gsf("grow --script " + out("path4.json") + " --out " + out("p4")) == 0);
  const json v = read_json(out("p4") + "/verdict.json");
  CHECK(v.at("dense_checked") == true);
  CHECK(v.at("state_is_lc_graph") == true);
  CHECK(fs::exists(out("p4") + "/final_graph.dot"));
}

TEST_CASE("plan and degree report") {
  REQUIRE(gsf("plan --target star6 --degree-report --out " + out("pl1")) == 0);
  const json m = read_json(out("pl1") + "/manifest.json");
  CHECK(m.at("summary").at("degree_report").at("min_max_degree_over_orbit") == 5);
  CHECK(m.at("summary").at("valid") == true);
  REQUIRE(gsf("plan --target path4 --pregrown --out " + out("pl2")) == 0);
  CHECK(read_json(out("pl2") + "/manifest.json").at("summary").at("peak_qubits") == 4);
  CHECK(fs::exists(out("pl2") + "/plan.json"));
}

TEST_CASE("resources command") {
  REQUIRE(gsf("resources --cluster 2 5 --out " + out("res")) == 0);
  const std::string csv = slurp(out("res") + "/resources.csv");
  CHECK(csv.find("\n2,8,10,") != std::string::npos);
  CHECK(csv.find("\n5,50,70,") != std::string::npos);
  REQUIRE(gsf("resources --cluster 3 --constructive --out " + out("res2")) == 0);
  CHECK(slurp(out("res2") + "/resources.csv").find("\n3,18,24,36,4,18,24,1,0") != std::string::npos);
}

TEST_CASE("density and products commands") {
  REQUIRE(gsf("density --nt 4 --ndt 4 --out " + out("den")) == 0);
  const std::string den = slurp(out("den") + "/density.csv");
  CHECK(std::count(den.begin(), den.end(), '\n') == 17);
  REQUIRE(gsf("products --out " + out("prod")) == 0);
  const json m = read_json(out("prod") + "/manifest.json");
  CHECK(m.at("summary").at("total_probability").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fidelity scan grid") {
  REQUIRE(gsf("fidelity-scan --axes omega1,gamma2 --grid 0.04:3 --out " + out("scan")) == 0);
  const std::string csv = slurp(out("scan") + "/scan.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
  CHECK(csv.rfind("omega1,gamma2,fidelity,infidelity", 0) == 0);
  CHECK(fs::exists(out("scan") + "/contours.json"));
}
