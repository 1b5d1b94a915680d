#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chaospec/cli.hpp"
#include "chaospec/io.hpp"
#include "chaospec/version.hpp"

using namespace chaospec;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir =
      fs::temp_directory_path() / "chaospec-io-tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_SUITE("io_cli") {
  TEST_CASE("printed doubles round-trip bit for bit") {
    const double values[] = {0.0,    0.1,   1.0 / 3.0, M_PI,     1e-300,
                             5e-324, 1e308, -2.5e17,   -1.0 / 7.0};
    for (double v : values) {
      const std::string text = io::format_double(v);
      // strtod instead of stod: stod throws on subnormals such as 5e-324
      CHECK(std::strtod(text.c_str(), nullptr) == v);
    }
    CHECK(io::format_double(2.0) == "2");
    CHECK(io::format_double(1.0 / 3.0) == "0.33333333333333331");
  }

  TEST_CASE("meta block keeps parameters in insertion order") {
    io::MetaBlock meta;
    meta.command = "unit";
    meta.add("zeta", 1.5);
    meta.add("alpha", std::int64_t{7});
    const std::string dumped = meta.as_json().dump();
    const auto zeta_at = dumped.find("\"zeta\"");
    const auto alpha_at = dumped.find("\"alpha\"");
    REQUIRE(zeta_at != std::string::npos);
    REQUIRE(alpha_at != std::string::npos);
    CHECK(zeta_at < alpha_at);
    CHECK(meta.as_json()["version"] == version);
    CHECK(meta.as_json()["command"] == "unit");
  }

  TEST_CASE("csv artifacts carry their reproduction header") {
    const fs::path dir = fresh_dir("csv");
    const fs::path path = dir / "table.csv";
    io::MetaBlock meta;
    meta.command = "unit";
    meta.add("beta", 2.0);
    io::write_csv(path.string(), meta, {"a", "b"},
                  {{0.5, 1.0 / 3.0}, {1.0, 2.0}});
    const auto lines = read_lines(path);
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == std::string("# chaospec ") + version);
    CHECK(lines[1] == "# command: unit");
    CHECK(lines[2] == "# beta: 2");
    CHECK(lines[3] == "a,b");
    CHECK(lines[4] == "0.5,0.33333333333333331");
    CHECK(lines[5] == "1,2");
    CHECK_THROWS_AS(
        io::write_csv("/nonexistent-dir/x.csv", meta, {"a"}, {{1.0}}),
        std::invalid_argument);
  }

  TEST_CASE("json artifacts embed the meta block") {
    const fs::path dir = fresh_dir("json");
    const fs::path path = dir / "body.json";
    io::MetaBlock meta;
    meta.command = "unit";
    meta.add("n", std::int64_t{3});
    io::json body;
    body["value"] = 1.25;
    io::write_json(path.string(), meta, body);
    const io::json parsed = io::json::parse(read_all(path));
    CHECK(parsed["value"] == 1.25);
    CHECK(parsed["meta"]["command"] == "unit");
    CHECK(parsed["meta"]["params"]["n"] == "3");
    CHECK(parsed["meta"]["version"] == version);
  }

  TEST_CASE("json-lines artifacts hold one record per line") {
    const fs::path dir = fresh_dir("jsonl");
    const fs::path path = dir / "records.jsonl";
    io::write_json_lines(path.string(),
                         {{{"op", "a"}}, {{"op", "b"}}, {{"op", "c"}}});
    const auto lines = read_lines(path);
    REQUIRE(lines.size() == 3);
    CHECK(io::json::parse(lines[0])["op"] == "a");
    CHECK(io::json::parse(lines[2])["op"] == "c");
  }

  TEST_CASE("svg charts are self-contained documents") {
    const fs::path dir = fresh_dir("svg");
    const fs::path path = dir / "chart.svg";
    io::write_svg(path.string(), "demo", "x", "y",
                  {{"one", {0.0, 1.0, 2.0}, {0.0, 1.0, 0.5}},
                   {"two", {0.0, 1.0, 2.0}, {1.0, 0.0, 0.25}}});
    const std::string text = read_all(path);
    CHECK(text.rfind("<svg", 0) == 0);
    CHECK(text.find("</svg>") != std::string::npos);
    CHECK(text.find("demo") != std::string::npos);
    std::size_t polylines = 0;
    for (std::size_t at = text.find("<polyline"); at != std::string::npos;
         at = text.find("<polyline", at + 1))
      ++polylines;
    CHECK(polylines == 2);
  }

  TEST_CASE("spectrum command writes a parseable table") {
    const fs::path dir = fresh_dir("cli-spectrum");
    const fs::path path = dir / "spec.csv";
    REQUIRE(cli::run_command({"spectrum-she", "--beta", "1", "--t", "1",
                              "--output", path.string()}) == 0);
    const auto lines = read_lines(path);
    REQUIRE(lines.size() > 5);
    // probabilities start after the header line "n,prob"
    std::size_t header = 0;
    while (header < lines.size() && lines[header] != "n,prob") ++header;
    REQUIRE(header < lines.size());
    double mass = 0.0;
    for (std::size_t i = header + 1; i < lines.size(); ++i) {
      const auto comma = lines[i].find(',');
      REQUIRE(comma != std::string::npos);
      mass += std::stod(lines[i].substr(comma + 1));
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("command failures map to distinct exit codes") {
    const fs::path dir = fresh_dir("cli-exit");
    // 2: usage or domain errors
    CHECK(cli::run_command({"no-such-command"}) == 2);
    CHECK(cli::run_command({"spectrum-she", "--no-such-flag", "1"}) == 2);
    CHECK(cli::run_command({"spectrum-she", "--beta", "-1", "--t", "1",
                            "--output", (dir / "x.csv").string()}) == 2);
    CHECK(cli::run_command({"kinetic-sim", "--dim", "1", "--xi", "0,0",
                            "--n-samples", "100", "--output",
                            (dir / "k.json").string()}) == 2);
    // 3: numeric failure (characteristic function overflows at q >> 700)
    CHECK(cli::run_command({"cf", "--model", "she", "--beta", "8", "--t", "5",
                            "--output", (dir / "cf.csv").string()}) == 3);
    // 0: help and version are not failures
    CHECK(cli::run_command({"--version"}) == 0);
    CHECK(cli::run_command({"--help"}) == 0);
  }

  TEST_CASE("config files set defaults and explicit flags override them") {
    const fs::path dir = fresh_dir("cli-config");
    const fs::path config = dir / "run.json";
    {
      std::ofstream out(config);
      out << R"({"beta": 2.0, "t": 3.0})" << "\n";
    }
    const fs::path path = dir / "spec.csv";
    REQUIRE(cli::run_command({"spectrum-she", "--config", config.string(),
                              "--t", "4", "--output", path.string()}) == 0);
    const auto lines = read_lines(path);
    bool beta_from_file = false, t_from_flag = false;
    for (const auto& line : lines) {
      if (line == "# beta: 2") beta_from_file = true;
      if (line == "# t: 4") t_from_flag = true;
    }
    CHECK(beta_from_file);
    CHECK(t_from_flag);

    const fs::path bad = dir / "bad.json";
    {
      std::ofstream out(bad);
      out << R"({"betta": 2.0})" << "\n";
    }
    CHECK(cli::run_command({"spectrum-she", "--config", bad.string()}) == 2);
    const fs::path malformed = dir / "malformed.json";
    {
      std::ofstream out(malformed);
      out << "{not json";
    }
    CHECK(cli::run_command({"spectrum-she", "--config", malformed.string()}) ==
          2);
  }

  TEST_CASE("identical invocations produce identical artifacts") {
    const fs::path dir = fresh_dir("cli-rerun");
    const fs::path a = dir / "a.json";
    const fs::path b = dir / "b.json";
    const std::vector<std::string> base{"clt-check", "--model", "she",
                                        "--beta",    "1",       "--t",
                                        "400"};
    auto with_output = [&](const fs::path& path) {
      auto args = base;
      args.push_back("--output");
      args.push_back(path.string());
      return args;
    };
    REQUIRE(cli::run_command(with_output(a)) == 0);
    REQUIRE(cli::run_command(with_output(b)) == 0);
    CHECK(read_all(a) == read_all(b));
    const io::json parsed = io::json::parse(read_all(a));
    CHECK(parsed["model"] == "she");
    CHECK(parsed["center"] == 200.0);
    CHECK(parsed["scale"] == 20.0);
    CHECK(parsed["ks"].get<double>() < 0.05);
  }

  TEST_CASE("lattice monte carlo emits one record per estimate") {
    const fs::path dir = fresh_dir("cli-mc");
    const fs::path path = dir / "mc.jsonl";
    REQUIRE(cli::run_command({"mc-she", "--beta", "1", "--t", "0.5", "--s",
                              "0.4", "--dx", "0.5", "--dt", "0.125",
                              "--half-width", "3", "--n-samples", "512",
                              "--seed", "7", "--output", path.string()}) == 0);
    const auto lines = read_lines(path);
    REQUIRE(lines.size() == 3);
    CHECK(io::json::parse(lines[0])["op"] == "mc-she.zz");
    CHECK(io::json::parse(lines[1])["op"] == "mc-she.z2");
    const io::json cor = io::json::parse(lines[2]);
    CHECK(cor["op"] == "mc-she.correlation");
    CHECK(cor["value"].get<double>() > 0.0);
    CHECK(cor["stderr"].get<double>() > 0.0);
    CHECK(cor["n"] == 512);
  }

  TEST_CASE("onset scan can render its chart next to the table") {
    const fs::path dir = fresh_dir("cli-svg");
    const fs::path path = dir / "scan.csv";
    REQUIRE(cli::run_command({"onset-scan", "--model", "gbm", "--alphas",
                              "0.5,2", "--times", "100,1000", "--svg",
                              "--output", path.string()}) == 0);
    REQUIRE(fs::exists(path));
    const fs::path svg = dir / "scan.svg";
    REQUIRE(fs::exists(svg));
    CHECK(read_all(svg).rfind("<svg", 0) == 0);
  }

  TEST_CASE("the output directory environment variable is honored") {
    const fs::path dir = fresh_dir("cli-env");
    REQUIRE(setenv("CHAOSPEC_OUT_DIR", dir.c_str(), 1) == 0);
    const int code = cli::run_command(
        {"correlation", "--model", "gbm", "--t", "2", "--s-values", "0.1,1"});
    REQUIRE(unsetenv("CHAOSPEC_OUT_DIR") == 0);
    REQUIRE(code == 0);
    CHECK(fs::exists(dir / "correlation.csv"));
  }
}
