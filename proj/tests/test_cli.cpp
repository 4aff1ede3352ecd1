#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <maxtree/maxtree.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "maxtree_cli_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Runs the CLI under test (path from the build system) with the given
// arguments, capturing both streams.
RunResult run_cli(const std::string& args) {
#ifdef MAXTREE_CLI_PATH
  const char* cli = MAXTREE_CLI_PATH;
#else
  const char* cli = std::getenv("MAXTREE_CLI_PATH");
#endif
  REQUIRE(cli != nullptr);
  const fs::path out_path = work_dir() / "stdout.txt";
  const fs::path err_path = work_dir() / "stderr.txt";
  const std::string cmd = std::string(cli) + " " + args + " >" +
                          out_path.string() + " 2>" + err_path.string();
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

fs::path write_staircase_pgm() {
  const fs::path path = work_dir() / "stairs.pgm";
  maxtree::save_pgm(maxtree::Image2D{2, 2, 8, {1, 2, 4, 3}}, path.string());
  return path;
}

} // namespace

TEST_CASE("build dumps the tree to stdout and a summary to stderr") {
  const fs::path img = write_staircase_pgm();
  const RunResult r = run_cli("build " + img.string() + " --algo salembier");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "0 0 1\n1 0 2\n3 1 3\n2 3 4\n");
  CHECK(r.err.find("nodes=4") != std::string::npos);
  CHECK(r.err.find("depth=4") != std::string::npos);
  CHECK(r.err.find("ms=") != std::string::npos);
}

TEST_CASE("build --out writes the same dump to a file") {
  const fs::path img = write_staircase_pgm();
  const fs::path dump = work_dir() / "stairs.tree";
  const RunResult r =
      run_cli("build " + img.string() + " --algo uf --out " + dump.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.empty());
  CHECK(slurp(dump) == "0 0 1\n1 0 2\n3 1 3\n2 3 4\n");
}

TEST_CASE("build rejects unknown algorithm ids with the known list") {
  const fs::path img = write_staircase_pgm();
  const RunResult r = run_cli("build " + img.string() + " --algo warpdrive");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("unknown algorithm id 'warpdrive'") != std::string::npos);
  CHECK(r.err.find("uf, uf_rank, uf_levelcomp, salembier, nonrec, parallel") !=
        std::string::npos);
}

TEST_CASE("parallel build emits a valid dump matching the sequential tree") {
  const fs::path img_path = write_staircase_pgm();
  const RunResult r = run_cli("build " + img_path.string() +
                              " --algo parallel --base uf_rank --bands 2" +
                              " --workers 2");
  REQUIRE(r.exit_code == 0);

  const maxtree::Image2D img = maxtree::load_pgm(img_path.string());
  const maxtree::TreeDump dump = maxtree::parse_tree_dump(r.out);
  CHECK(dump.levels == img.values);
  REQUIRE(maxtree::validate(dump.tree, img).ok());
  CHECK(maxtree::normalize(dump.tree, img) ==
        maxtree::normalize(maxtree::maxtree_uf(img), img));
}

TEST_CASE("filter performs an area opening") {
  const fs::path img = write_staircase_pgm();
  const fs::path out = work_dir() / "opened.pgm";
  const RunResult r = run_cli("filter " + img.string() + " --area 2 -o " +
                              out.string());
  REQUIRE(r.exit_code == 0);
  CHECK(maxtree::load_pgm(out.string()).values ==
        std::vector<maxtree::pixel_value>{1, 2, 3, 3});
}

TEST_CASE("filter output is identical whichever builder produced the tree") {
  const fs::path img = write_staircase_pgm();
  std::string first;
  for (const std::string algo :
       {"uf", "uf_rank", "uf_levelcomp", "salembier", "nonrec", "parallel"}) {
    const fs::path out = work_dir() / ("opened_" + algo + ".pgm");
    const std::string extra =
        algo == "parallel" ? " --base nonrec --bands 2" : "";
    const RunResult r = run_cli("filter " + img.string() + " --area 3 -o " +
                                out.string() + " --algo " + algo + extra);
    REQUIRE(r.exit_code == 0);
    const std::string bytes = slurp(out);
    if (first.empty())
      first = bytes;
    else
      CHECK(bytes == first);
  }
}

TEST_CASE("filter threshold 1 reproduces the input image bytes") {
  const fs::path img = write_staircase_pgm();
  const fs::path out = work_dir() / "identity.pgm";
  const RunResult r =
      run_cli("filter " + img.string() + " --area 1 -o " + out.string());
  REQUIRE(r.exit_code == 0);
  CHECK(slurp(out) == slurp(img));
}

TEST_CASE("filter rejects a zero area threshold") {
  const fs::path img = write_staircase_pgm();
  const RunResult r =
      run_cli("filter " + img.string() + " --area 0 -o /dev/null");
  CHECK(r.exit_code != 0);
}

TEST_CASE("validate cross-checks every builder and the reference") {
  const fs::path img = write_staircase_pgm();
  const RunResult r = run_cli("validate " + img.string());
  CHECK(r.exit_code == 0);
  for (const std::string id :
       {"uf", "uf_rank", "uf_levelcomp", "salembier", "nonrec", "parallel"})
    CHECK(r.out.find(id + ": ok (4 nodes)") != std::string::npos);
  CHECK(r.out.find("brute-force reference: ok") != std::string::npos);
  CHECK(r.out.find("all agree") != std::string::npos);
}

TEST_CASE("validate skips the recursive builder on deep images") {
  const fs::path img = work_dir() / "deep.bin";
  maxtree::save_raw(maxtree::Image2D{2, 2, 20, {0, 1000000, 17, 65536}},
                    img.string());
  const RunResult r = run_cli("validate " + img.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("salembier: skipped (bit depth 20") != std::string::npos);
  CHECK(r.out.find("all agree") != std::string::npos);
}

TEST_CASE("validate accepts a matching dump and rejects a corrupted one") {
  const fs::path img = write_staircase_pgm();
  const fs::path dump = work_dir() / "check.tree";
  REQUIRE(run_cli("build " + img.string() + " --out " + dump.string())
              .exit_code == 0);

  const RunResult good =
      run_cli("validate " + img.string() + " --dump " + dump.string());
  CHECK(good.exit_code == 0);
  CHECK(good.out.find("dump: ok (4 nodes)") != std::string::npos);

  // Corrupt the stored level of pixel 2 (line "2 3 4" -> "2 3 9").
  std::string text = slurp(dump);
  text.replace(text.find("2 3 4"), 5, "2 3 9");
  std::ofstream(dump, std::ios::binary) << text;
  const RunResult bad =
      run_cli("validate " + img.string() + " --dump " + dump.string());
  CHECK(bad.exit_code == 1);
  CHECK(bad.out.find("dump: pixel 2 has level 9 but the image holds 4") !=
        std::string::npos);
}

TEST_CASE("recommend prints the choice with its reasoning") {
  const RunResult r = run_cli("recommend --bits 8");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("algorithm: salembier") != std::string::npos);
  CHECK(r.out.find("rationale: ") != std::string::npos);

  const RunResult deep = run_cli("recommend --bits 20 --parallel");
  CHECK(deep.exit_code == 0);
  CHECK(deep.out.find("algorithm: uf_rank") != std::string::npos);
  CHECK(deep.out.find("warning: ") != std::string::npos);

  CHECK(run_cli("recommend").exit_code != 0); // --bits is required
}

TEST_CASE("bench emits csv with the expected header") {
  const RunResult r = run_cli("bench --mp 0.001 --bits 8 --algos uf --reps 3");
  REQUIRE(r.exit_code == 0);
  std::istringstream out(r.out);
  std::string header;
  REQUIRE(std::getline(out, header));
  CHECK(header == maxtree::kBenchCsvHeader);
  std::size_t rows = 0;
  std::string line;
  while (std::getline(out, line)) ++rows;
  CHECK(rows == 4); // sort, build, canonize+S, total
}

TEST_CASE("a missing input file is a reported error, not a crash") {
  const RunResult r = run_cli("build /nonexistent/missing.pgm");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("maxtree: cannot open /nonexistent/missing.pgm") !=
        std::string::npos);
}
