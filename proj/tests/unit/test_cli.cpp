#include <sys/wait.h>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run uvg(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "uvg_cli_test.log";
  const std::string cmd = std::string(UVG_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream f(log);
  std::stringstream ss;
  ss << f.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("uvg_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and usage errors") {
    const Run h = uvg("--help");
    CHECK(h.code == 0);
    CHECK(h.out.find("Exit codes") != std::string::npos);
    CHECK(uvg("").code == 2);
    CHECK(uvg("train --no-such-flag").code == 2);
  }

  TEST_CASE("config errors exit 2") {
    const fs::path d = scratch("cfg");
    CHECK(uvg("train --config " + (d / "absent.cfg").string() + " --out " + d.string()).code == 2);
    std::ofstream(d / "bad.cfg") << "train.no_such_key = 3\n";
    const Run r = uvg("train --config " + (d / "bad.cfg").string() + " --out " + d.string());
    CHECK(r.code == 2);
    CHECK(r.out.find("train.no_such_key") != std::string::npos);
    std::ofstream(d / "range.cfg") << "sampler.start_fraction = 1.5\n";
    CHECK(uvg("sample --config " + (d / "range.cfg").string() + " --out " + d.string()).code == 2);
  }

  TEST_CASE("missing checkpoint exits 4") {
    const fs::path d = scratch("ckpt");
    for (const char* cmd : {"sample", "eval", "sweep-guidance"}) {
      const Run r = uvg(std::string(cmd) + " --out " + d.string());
      CHECK(r.code == 4);
      CHECK(r.out.find("model.uvgl") != std::string::npos);
    }
  }

  TEST_CASE("tampered fixture exits 5 and names the file") {
    const fs::path d = scratch("fix");
    fs::copy(UVG_FIXTURE_DIR, d / "fixtures", fs::copy_options::recursive);
    std::string text;
    {
      std::ifstream f(d / "fixtures" / "schedule.csv");
      std::stringstream ss;
      ss << f.rdbuf();
      text = ss.str();
    }
    // Flip one digit of the first expected value.
    const auto row = text.find('\n') + 1;
    const auto comma = text.find(',', text.find(',', row) + 1) + 1;
    std::size_t pos = comma;
    while (!std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '0') ++pos;
    text[pos] = text[pos] == '9' ? '1' : static_cast<char>(text[pos] + 1);
    std::ofstream(d / "fixtures" / "schedule.csv") << text;
    const Run r = uvg("oracle-check --filter schedule --fixtures " + (d / "fixtures").string() + " --out " + d.string());
    CHECK(r.code == 5);
    CHECK(r.out.find("schedule.csv") != std::string::npos);

    fs::remove(d / "fixtures" / "bgn.csv");
    const Run m = uvg("oracle-check --filter bgn --fixtures " + (d / "fixtures").string() + " --out " + d.string());
    CHECK(m.code == 5);
    CHECK(m.out.find("bgn.csv") != std::string::npos);
    CHECK(uvg("oracle-check --filter nothing-matches --out " + d.string()).code == 5);
  }

  TEST_CASE("train writes its artifacts") {
    const fs::path d = scratch("train");
    std::ofstream(d / "t.cfg") << "task.kind = gauss2d\ntrain.n_iterations = 4\ntrain.eval_every = 2\ntask.eval_samples = 50\n";
    const Run r = uvg("train --config " + (d / "t.cfg").string() + " --out " + d.string());
    REQUIRE(r.code == 0);
    for (const char* f : {"resolved.cfg", "metrics.csv", "model.uvgl", "ckpt_2.uvgl", "ckpt_4.uvgl"})
      CHECK(fs::exists(d / f));
    CHECK(uvg("eval --config " + (d / "t.cfg").string() + " --steps 5 --out " + d.string()).code == 0);
    CHECK(fs::exists(d / "eval.csv"));
  }
}
