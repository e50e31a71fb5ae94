#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "htype/cli.hpp"
#include "htype/io.hpp"

using namespace htype;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("htype_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "htype");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("group JSON round trip") {
  for (auto [m, n] : {std::pair{1, 1}, std::pair{3, 2}, std::pair{7, 4}}) {
    const HTypeGroup g = build_htype_group(m, n);
    const Json j = group_to_json(g);
    const HTypeGroup back = group_from_json(Json::parse(j.dump()));
    CHECK(group_to_json(back) == j);
  }
  CHECK_THROWS_AS(group_from_json(Json::parse(R"({"n": 1})")), ParseError);
}

TEST_CASE("binary grid and sample files round trip") {
  const TempDir dir;
  const TensorGrid grid = group_grid(build_htype_group(1, 1), 8, 3.0, 6, 5.0);
  const GridField f = sample_field(grid, [](std::span<const double> x) {
    return Complex(x[0] - 0.25 * x[2], x[1] * x[1] + 1e-300);
  });
  write_grid(dir.file("f.htgrid"), f, 1);
  int n = 0;
  const GridField back = read_grid(dir.file("f.htgrid"), &n);
  CHECK(n == 1);
  CHECK(back.grid.same_as(grid));
  CHECK(back.values == f.values);

  GroupSamples s = make_samples(2, 3, {0.0, 0.5, 1.25}, {0.1, 0.2, 0.3, -1.0, 2.0, 1e-17});
  for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = Complex(1.0 / (i + 3.0), -double(i));
  write_samples(dir.file("s.htsamp"), s);
  const GroupSamples sb = read_samples(dir.file("s.htsamp"));
  CHECK(sb.n == 2);
  CHECK(sb.m == 3);
  CHECK(sb.radii == s.radii);
  CHECK(sb.t_points == s.t_points);
  CHECK(sb.values == s.values);

  write_text(dir.file("bad.htgrid"), "HTGRID01 truncated");
  CHECK_THROWS_AS(read_grid(dir.file("bad.htgrid")), ParseError);
  CHECK_THROWS_AS(read_samples(dir.file("f.htgrid")), ParseError);
  CHECK_THROWS(read_grid(dir.file("missing.htgrid")));
}

TEST_CASE("curve CSV round trip is exact") {
  ConstantCurve c;
  c.rows = {{1e3, 1.0 / 3.0, 64, 1e-12}, {2.5e4, std::nextafter(7.0, 8.0), 128, 3.3e-11}};
  const std::vector<ConstantRow> back = parse_curve_csv(curve_csv(c));
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].mu == c.rows[i].mu);
    CHECK(back[i].c_mu == c.rows[i].c_mu);
    CHECK(back[i].k_used == c.rows[i].k_used);
    CHECK(back[i].tail_bound == c.rows[i].tail_bound);
  }
  CHECK_THROWS_AS(parse_curve_csv("mu,c_mu\n1,2\n"), ParseError);
  CHECK_THROWS_AS(parse_curve_csv("mu,c_mu,k_used,tail_bound\n1,x,3,0\n"), ParseError);
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-310}) CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
}

TEST_CASE("mu grid specifications") {
  const std::vector<double> lg = parse_mu_spec("log:1e3:1e7:5");
  REQUIRE(lg.size() == 5);
  CHECK(lg.front() == doctest::Approx(1e3));
  CHECK(lg[2] == doctest::Approx(1e5));
  CHECK(lg.back() == doctest::Approx(1e7));
  const std::vector<double> ln = parse_mu_spec("lin:0.5:2.5:5");
  CHECK(ln[1] == doctest::Approx(1.0));
  const std::vector<double> e1 = parse_mu_spec("eps1:1e-4:1e-1:4");
  REQUIRE(e1.size() == 4);
  CHECK(e1.front() == doctest::Approx(0.9));
  CHECK(e1.back() == doctest::Approx(1.0 - 1e-4));
  for (std::size_t i = 1; i < e1.size(); ++i) CHECK(e1[i] > e1[i - 1]);
  for (const char* bad : {"log:1:2", "cubic:1:2:3", "log:0:1:5", "lin:1:2:x", "log:1:2:1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_mu_spec(bad), ParseError);
  }
}

TEST_CASE("file digest is FNV-1a 64") {
  const TempDir dir;
  write_text(dir.file("empty"), "");
  write_text(dir.file("a"), "a");
  write_text(dir.file("foobar"), "foobar");
  CHECK(cli::file_digest(dir.file("empty")) == "cbf29ce484222325");
  CHECK(cli::file_digest(dir.file("a")) == "af63dc4c8601ec8c");
  CHECK(cli::file_digest(dir.file("foobar")) == "85944171f73967e8");
}

TEST_CASE("command line: group build and verify") {
  const TempDir dir;
  const std::string g = dir.file("g.json");
  CHECK(run({"group", "build", "--m", "3", "--n", "2", "--out", g}).code == cli::kExitOk);
  CHECK(fs::exists(g + ".manifest.json"));
  const Result v = run({"group", "verify", g});
  CHECK(v.code == cli::kExitOk);
  CHECK(Json::parse(v.out).contains("max_violation"));

  // a perturbed entry fails the check with a numerical exit code
  Json j = Json::parse(read_text(g));
  j["U"][0][0][1] = j["U"][0][0][1].get<double>() + 1e-6;
  write_text(dir.file("bad.json"), j.dump());
  CHECK(run({"group", "verify", dir.file("bad.json")}).code == cli::kExitNumerical);

  CHECK(run({"group", "build", "--m", "2", "--n", "1", "--out", dir.file("x.json")}).code == cli::kExitValidation);
  CHECK_FALSE(fs::exists(dir.file("x.json")));
}

TEST_CASE("command line: exit codes") {
  const TempDir dir;
  CHECK(run({"--help"}).code == cli::kExitOk);
  CHECK(run({"--version"}).code == cli::kExitOk);
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"bogus"}).code == cli::kExitUsage);
  CHECK(run({"constant", "--profile", "delta", "--p", "1"}).code == cli::kExitUsage);
  const std::string csv = dir.file("c.csv");
  CHECK(run({"constant", "--profile", "delta", "--p", "1.9", "--n", "2", "--m", "3", "--mu", "log:1e3:1e4:9",
             "--out", csv}).code == cli::kExitValidation);
  CHECK(run({"constant", "--profile", "nonsense", "--p", "1", "--n", "2", "--m", "3", "--mu", "log:1e3:1e4:9",
             "--out", csv}).code == cli::kExitValidation);
  CHECK(run({"constant", "--profile", "delta", "--p", "1", "--n", "2", "--m", "3", "--mu", "log:1e3",
             "--out", csv}).code == cli::kExitValidation);
  CHECK_FALSE(fs::exists(csv));
}

TEST_CASE("command line: constant, fit and replay") {
  const TempDir dir;
  const std::string csv = dir.file("c.csv");
  const std::vector<std::string> args{"constant", "--profile", "sum:alpha=1,beta=1", "--p", "1", "--n", "2",
                                      "--m", "3", "--mu", "log:1e3:1e7:17", "--out", csv};
  REQUIRE(run(args).code == cli::kExitOk);
  const Json manifest = Json::parse(read_text(csv + ".manifest.json"));
  CHECK(manifest["schema_version"] == kSchemaVersion);
  CHECK(manifest["command"] == "constant");
  CHECK(manifest["outputs"][0]["fnv1a64"] == cli::file_digest(csv));
  CHECK(parse_curve_csv(read_text(csv)).size() == 17);

  const Result fit = run({"fit", "--in", csv, "--regime", "large", "--tolerance", "0.05"});
  CHECK(fit.code == cli::kExitOk);
  const Json report = Json::parse(fit.out);
  CHECK(report["predicted"].get<double>() == doctest::Approx(2.5));
  CHECK(std::abs(report["fitted"].get<double>() - 2.5) <= 0.05);

  // the same arguments reproduce the same bytes
  const std::string first = read_text(csv);
  const Result replay = run({"replay", csv + ".manifest.json"});
  CHECK(replay.code == cli::kExitOk);
  CHECK(Json::parse(replay.out)["identical"] == true);
  CHECK(read_text(csv) == first);

  // a manifest whose recorded digest does not match fails the replay
  Json altered = Json::parse(read_text(csv + ".manifest.json"));
  altered["outputs"][0]["fnv1a64"] = "0000000000000000";
  write_text(dir.file("altered.json"), altered.dump());
  const Result bad = run({"replay", dir.file("altered.json")});
  CHECK(bad.code == cli::kExitNumerical);
  CHECK(Json::parse(bad.out)["identical"] == false);
}
