// Exercises the installed CLI binary end to end: exit codes, output schemas,
// and byte-identical reruns.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(BHS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  if (status < 0) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int failures = 0;

void check(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    std::cerr << "FAILED: " << what << "\n";
  } else {
    std::cout << "ok: " << what << "\n";
  }
}

}  // namespace

int main() {
  check(run("") == 64, "no command prints usage and exits 64");
  check(run("frobnicate") == 64, "unknown command exits 64");
  check(run("covering --bogus-flag 1") == 64, "unknown flag exits 64");
  check(run("homogenize --cell disk --R 1.5 --h 0.1") == 2,
        "invalid geometry exits 2");
  check(run("covering --eps-max 0.1 --eps-min 0.2 --residual 0.1") == 2,
        "inconsistent scales exit 2");

  std::system("mkdir -p cli_out_a cli_out_b");
  check(run("--out cli_out_a covering --eps-max 0.2 --eps-min 0.04 "
            "--residual 0.15 --seed 7 --grid 256") == 0,
        "covering command succeeds");
  check(run("--out cli_out_b covering --eps-max 0.2 --eps-min 0.04 "
            "--residual 0.15 --seed 7 --grid 256") == 0,
        "covering rerun succeeds");
  check(slurp("cli_out_a/covering.json") == slurp("cli_out_b/covering.json") &&
            !slurp("cli_out_a/covering.json").empty(),
        "covering output byte-identical across reruns");

  check(run("--out cli_out_a homogenize --cell disk --R 0.7071 --alpha 1 "
            "--beta 2 --h 0.05 --route integral") == 0,
        "homogenize command succeeds");
  {
    auto j = nlohmann::json::parse(slurp("cli_out_a/homogenize.json"));
    double m00 = j["cell_integral"]["entries"][0].get<double>();
    double m11 = j["cell_integral"]["entries"][3].get<double>();
    double gamma = 10.0 / 7.0;
    check(std::abs(m00 - gamma) / gamma < 0.02 &&
              std::abs(m11 - gamma) / gamma < 0.02,
          "homogenize tensor is close to (10/7) I");
    check(j.contains("config_hash"), "output carries the config hash");
  }
  {
    auto manifest =
        nlohmann::json::parse(slurp("cli_out_a/homogenize.manifest.json"));
    check(manifest["command"] == "homogenize" && manifest.contains("config") &&
              manifest.contains("config_hash") && manifest.contains("timestamp"),
          "manifest records command, config, hash");
  }

  // config file + flag override
  {
    std::ofstream cfg("cli_out_a/cfg.json");
    cfg << R"({"cell": "disk", "R": 0.7071, "alpha": 1.0, "beta": 2.0, )"
        << R"("h": 0.08, "route": "integral"})";
  }
  check(run("--out cli_out_b --config cli_out_a/cfg.json homogenize") == 0,
        "config-file-driven run succeeds");
  {
    auto j = nlohmann::json::parse(slurp("cli_out_b/homogenize.json"));
    double m00 = j["cell_integral"]["entries"][0].get<double>();
    check(std::abs(m00 - 10.0 / 7.0) / (10.0 / 7.0) < 0.05,
          "config-file run produces the tensor");
  }

  check(run("--out cli_out_a cell-spectrum --cell disk --R 0.7071 --h 0.1 "
            "--fan 8 --eta-radius 0.3") == 0,
        "cell-spectrum command succeeds");
  {
    std::string csv = slurp("cli_out_a/cell-spectrum.csv");
    check(csv.rfind("# config=", 0) == 0, "csv starts with the config hash");
    check(csv.find("eta_1,eta_2,lambda1,residual,iterations") !=
              std::string::npos,
          "csv has the sweep schema");
  }

  std::system("rm -rf cli_out_a cli_out_b");
  if (failures == 0) std::cout << "all cli checks passed\n";
  return failures == 0 ? 0 : 1;
}
