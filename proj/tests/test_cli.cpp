#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "msac/image_io.hpp"
#include "msac/metrics.hpp"
#include "msac/phantom.hpp"

using namespace msac;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MSAC_CLI_BIN) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_spec(const fs::path& p, const std::string& extra = "") {
  std::ofstream out(p);
  out << "width = 96\nheight = 96\ncx = 48\ncy = 48\na = 25\nb = 22\n" << extra;
}

}  // namespace

TEST_CASE("cli phantom writes deterministic outputs and honors --force") {
  TempDir dir("msac_cli_phantom");
  const fs::path spec = dir.path / "spec.txt";
  write_spec(spec, "speckle_sigma = 0.15\nrng_seed = 7\n");

  const std::string out = (dir.path / "out").string();
  REQUIRE(run_cli("phantom --spec " + spec.string() + " --out " + out) == 0);
  REQUIRE(fs::exists(fs::path(out) / "phantom.pgm"));
  REQUIRE(fs::exists(fs::path(out) / "truth.pgm"));
  REQUIRE(fs::exists(fs::path(out) / "spec_echo.txt"));
  const std::string first = slurp(fs::path(out) / "phantom.pgm");

  // refuses to overwrite without --force
  REQUIRE(run_cli("phantom --spec " + spec.string() + " --out " + out) == 2);
  // identical bytes on a forced rerun
  REQUIRE(run_cli("phantom --spec " + spec.string() + " --out " + out + " --force") == 0);
  REQUIRE(slurp(fs::path(out) / "phantom.pgm") == first);
}

TEST_CASE("cli phantom rejects an out-of-bounds shape") {
  TempDir dir("msac_cli_phantom_bad");
  const fs::path spec = dir.path / "spec.txt";
  {
    std::ofstream out(spec);
    out << "width = 16\nheight = 16\ncx = 8\ncy = 8\na = 40\nb = 40\n";
  }
  REQUIRE(run_cli("phantom --spec " + spec.string() + " --out " + (dir.path / "o").string()) == 2);
}

TEST_CASE("cli segment produces mask, overlay, log and manifest") {
  TempDir dir("msac_cli_segment");
  const fs::path spec = dir.path / "spec.txt";
  write_spec(spec);
  const std::string pdir = (dir.path / "ph").string();
  REQUIRE(run_cli("phantom --spec " + spec.string() + " --out " + pdir) == 0);

  const std::string out = (dir.path / "seg").string();
  const int rc = run_cli("segment --input " + pdir + "/phantom.pgm --model proposed" +
                         " --seed 48,48,20,20 --out " + out +
                         " --n_scales 3 --max_iters_per_scale 120");
  REQUIRE(rc == 0);
  REQUIRE(fs::exists(fs::path(out) / "mask.pgm"));
  REQUIRE(fs::exists(fs::path(out) / "overlay.png"));
  REQUIRE(fs::exists(fs::path(out) / "run.log"));
  REQUIRE(fs::exists(fs::path(out) / "manifest.txt"));
  REQUIRE(fs::exists(fs::path(out) / "scale_0_mask.pgm"));
  REQUIRE(fs::exists(fs::path(out) / "scale_2_mask.pgm"));

  const BinaryMask got = load_mask((fs::path(out) / "mask.pgm").string());
  const BinaryMask truth = load_mask((fs::path(pdir) / "truth.pgm").string());
  REQUIRE(score(got, truth).js >= 0.95);

  // manifest echoes resolved values, including flag overrides
  const std::string manifest = slurp(fs::path(out) / "manifest.txt");
  REQUIRE(manifest.find("n_scales = 3") != std::string::npos);
  REQUIRE(manifest.find("omega1 = 0.9") != std::string::npos);

  // refuse overwrite, allow --force
  REQUIRE(run_cli("segment --input " + pdir + "/phantom.pgm --model proposed" +
                  " --seed 48,48,20,20 --out " + out) == 2);
}

TEST_CASE("cli segment baseline models run") {
  TempDir dir("msac_cli_baselines");
  const fs::path spec = dir.path / "spec.txt";
  write_spec(spec);
  const std::string pdir = (dir.path / "ph").string();
  REQUIRE(run_cli("phantom --spec " + spec.string() + " --out " + pdir) == 0);

  const std::string cfg = (dir.path / "cfg.txt").string();
  {
    std::ofstream out(cfg);
    out << "cv_max_iters = 60\ndrlse_max_iters = 60\n";
  }
  for (const std::string model : {"cv", "drlse"}) {
    const std::string out = (dir.path / ("seg_" + model)).string();
    REQUIRE(run_cli("segment --input " + pdir + "/phantom.pgm --model " + model +
                    " --seed 48,48,20,20 --config " + cfg + " --out " + out) == 0);
    REQUIRE(fs::exists(fs::path(out) / "mask.pgm"));
    REQUIRE(fs::exists(fs::path(out) / "overlay.png"));
  }
}

TEST_CASE("cli segment missing input exits 2 with no outputs") {
  TempDir dir("msac_cli_missing");
  const std::string out = (dir.path / "seg").string();
  REQUIRE(run_cli("segment --input /nonexistent.pgm --seed 10,10,5,5 --out " + out) == 2);
  REQUIRE(!fs::exists(fs::path(out) / "mask.pgm"));
}

TEST_CASE("cli segment rejects a bad model name") {
  TempDir dir("msac_cli_badmodel");
  const fs::path spec = dir.path / "spec.txt";
  write_spec(spec);
  const std::string pdir = (dir.path / "ph").string();
  REQUIRE(run_cli("phantom --spec " + spec.string() + " --out " + pdir) == 0);
  REQUIRE(run_cli("segment --input " + pdir + "/phantom.pgm --model nosuch --seed 48,48,20,20 --out " +
                  (dir.path / "x").string()) == 2);
}

TEST_CASE("cli eval scores matching directories") {
  TempDir dir("msac_cli_eval");
  const fs::path a = dir.path / "auto", m = dir.path / "manual";
  fs::create_directories(a);
  fs::create_directories(m);

  BinaryMask m1(16, 16), m2(16, 16);
  for (int y = 4; y < 12; ++y)
    for (int x = 4; x < 12; ++x) m1.set(x, y, true);
  for (int y = 4; y < 12; ++y)
    for (int x = 5; x < 12; ++x) m2.set(x, y, true);
  write_mask_pgm((a / "c1.pgm").string(), m1);
  write_mask_pgm((m / "c1.pgm").string(), m1);
  write_mask_pgm((a / "c2.pgm").string(), m2);
  write_mask_pgm((m / "c2.pgm").string(), m1);

  const std::string csv = (dir.path / "scores.csv").string();
  REQUIRE(run_cli("eval --auto " + a.string() + " --manual " + m.string() + " --out " + csv) == 0);
  const std::string text = slurp(csv);
  REQUIRE(text.find("case,tp,fp,js") == 0);
  REQUIRE(text.find("c1.pgm,1,0,1") != std::string::npos);
  REQUIRE(text.find("mean±std(population)") != std::string::npos);

  // identical dirs: every row is (1, 0, 1)
  const std::string csv2 = (dir.path / "same.csv").string();
  REQUIRE(run_cli("eval --auto " + m.string() + " --manual " + m.string() + " --out " + csv2) == 0);
  std::istringstream rows(slurp(csv2));
  std::string line;
  std::getline(rows, line);  // header
  for (int i = 0; i < 2; ++i) {
    std::getline(rows, line);
    REQUIRE(line.substr(line.find(',') + 1) == "1,0,1");
  }
}

TEST_CASE("cli eval rejects empty and mismatched directories") {
  TempDir dir("msac_cli_eval_bad");
  const fs::path a = dir.path / "auto", m = dir.path / "manual";
  fs::create_directories(a);
  fs::create_directories(m);
  const std::string csv = (dir.path / "s.csv").string();
  REQUIRE(run_cli("eval --auto " + a.string() + " --manual " + m.string() + " --out " + csv) == 2);

  BinaryMask mask(8, 8);
  mask.set(2, 2, true);
  write_mask_pgm((a / "x.pgm").string(), mask);
  write_mask_pgm((m / "y.pgm").string(), mask);
  REQUIRE(run_cli("eval --auto " + a.string() + " --manual " + m.string() + " --out " + csv) == 2);
}
