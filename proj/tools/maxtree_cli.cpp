#include <CLI11.hpp>

#include <maxtree/maxtree.hpp>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace maxtree;

Connectivity conn_of(const std::string& name) {
  return name == "c8" ? Connectivity::C8 : Connectivity::C4;
}

// Resolves an algorithm id (one of the sequential ids or "parallel") plus the
// band/worker/base options into a build request.
std::optional<BuildSpec> resolve_spec(const std::string& id,
                                      const std::string& base_id,
                                      std::uint32_t bands, unsigned workers,
                                      std::string& error) {
  BuildSpec spec;
  spec.bands = bands;
  spec.workers = workers;
  if (id == "parallel") {
    spec.parallel = true;
    const auto base = algorithm_from_string(base_id);
    if (!base) {
      error = "unknown base algorithm id '" + base_id +
              "'; known ids: " + algorithm_id_list(false);
      return std::nullopt;
    }
    spec.base = *base;
    return spec;
  }
  const auto algo = algorithm_from_string(id);
  if (!algo) {
    error = "unknown algorithm id '" + id +
            "'; known ids: " + algorithm_id_list();
    return std::nullopt;
  }
  spec.base = *algo;
  return spec;
}

std::size_t count_nodes(const MaxTree& t, const Image2D& img) {
  std::size_t nodes = 0;
  for (pixel_index p = 0; p < t.parent.size(); ++p)
    if (is_canonical(t, img, p)) ++nodes;
  return nodes;
}

// Longest root-to-node path counted in nodes (a constant image has depth 1).
std::size_t tree_depth(const MaxTree& t, const Image2D& img) {
  if (t.S.empty()) return 0;
  std::vector<std::uint32_t> depth(t.parent.size(), 0);
  std::size_t deepest = 1;
  depth[t.S[0]] = 1;
  for (std::size_t i = 1; i < t.S.size(); ++i) {
    const pixel_index p = t.S[i];
    const pixel_index q = t.parent[p];
    depth[p] = depth[q] + (img[p] != img[q] ? 1 : 0);
    if (depth[p] > deepest) deepest = depth[p];
  }
  return deepest;
}

int run_build(const std::string& image_path, const std::string& algo_id,
              const std::string& base_id, std::uint32_t bands,
              unsigned workers, const std::string& conn_name,
              const std::string& out_path) {
  std::string error;
  const auto spec = resolve_spec(algo_id, base_id, bands, workers, error);
  if (!spec) {
    std::cerr << "maxtree build: " << error << "\n";
    return 2;
  }
  const Image2D img = load_image_any(image_path);
  const auto t0 = std::chrono::steady_clock::now();
  const MaxTree tree = build_maxtree(img, conn_of(conn_name), *spec);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();
  const std::string dump = format_tree_dump(tree, img);
  if (out_path.empty())
    std::cout << dump;
  else
    detail::write_file(out_path, dump);
  std::cerr << "nodes=" << count_nodes(tree, img)
            << " depth=" << tree_depth(tree, img) << " ms=" << ms << "\n";
  return 0;
}

int run_filter(const std::string& image_path, const std::string& algo_id,
               const std::string& base_id, std::uint32_t bands,
               unsigned workers, const std::string& conn_name,
               std::uint64_t area, const std::string& out_path) {
  std::string error;
  const auto spec = resolve_spec(algo_id, base_id, bands, workers, error);
  if (!spec) {
    std::cerr << "maxtree filter: " << error << "\n";
    return 2;
  }
  const Image2D img = load_image_any(image_path);
  const Connectivity conn = conn_of(conn_name);
  const MaxTree tree = build_maxtree(img, conn, *spec);
  const Image2D opened = area_opening(tree, img, area);
  save_image_any(opened, out_path);
  return 0;
}

int run_validate(const std::string& image_path,
                 std::vector<std::string> algo_ids, const std::string& base_id,
                 std::uint32_t bands, unsigned workers,
                 const std::string& conn_name, const std::string& dump_path) {
  const Image2D img = load_image_any(image_path);
  const Connectivity conn = conn_of(conn_name);
  if (algo_ids.empty()) {
    for (const Algorithm a : kAllAlgorithms)
      algo_ids.push_back(to_string(a));
    algo_ids.emplace_back("parallel");
  }

  struct Entry {
    std::string label;
    NormalizedTree tree;
  };
  std::vector<Entry> trees;
  for (const std::string& id : algo_ids) {
    std::string error;
    const auto spec = resolve_spec(id, base_id, bands, workers, error);
    if (!spec) {
      std::cerr << "maxtree validate: " << error << "\n";
      return 2;
    }
    if (spec->base == Algorithm::Salembier &&
        img.bit_depth >= kBucketQueueBitLimit) {
      std::cout << id << ": skipped (bit depth " << img.bit_depth
                << " needs the non-recursive builder)\n";
      continue;
    }
    const MaxTree t = build_maxtree(img, conn, *spec);
    const ValidationReport report = validate(t, img);
    if (!report.ok()) {
      std::cout << id << ": INVALID\n" << report.to_string();
      return 1;
    }
    trees.push_back({id, normalize(t, img)});
    std::cout << id << ": ok (" << trees.back().tree.node_count << " nodes)\n";
  }
  if (!dump_path.empty()) {
    const TreeDump dump = parse_tree_dump(detail::read_file(dump_path));
    if (dump.tree.parent.size() != img.size()) {
      std::cout << "dump: size " << dump.tree.parent.size()
                << " does not match image (" << img.size() << " pixels)\n";
      return 1;
    }
    for (pixel_index p = 0; p < img.size(); ++p)
      if (dump.levels[p] != img[p]) {
        std::cout << "dump: pixel " << p << " has level " << dump.levels[p]
                  << " but the image holds " << img[p] << "\n";
        return 1;
      }
    const ValidationReport report = validate(dump.tree, img);
    if (!report.ok()) {
      std::cout << "dump: INVALID\n" << report.to_string();
      return 1;
    }
    trees.push_back({"dump", normalize(dump.tree, img)});
    std::cout << "dump: ok (" << trees.back().tree.node_count << " nodes)\n";
  }
  for (std::size_t i = 1; i < trees.size(); ++i)
    if (!(trees[i].tree == trees[0].tree)) {
      std::cout << "MISMATCH between " << trees[0].label << " and "
                << trees[i].label << ":\n"
                << describe_divergence(trees[0].tree, trees[i].tree) << "\n";
      return 1;
    }
  if (img.size() <= 10000 && !trees.empty()) {
    const NormalizedTree oracle = brute_maxtree(img, conn);
    if (!(oracle == trees[0].tree)) {
      std::cout << "MISMATCH against brute-force reference:\n"
                << describe_divergence(trees[0].tree, oracle) << "\n";
      return 1;
    }
    std::cout << "brute-force reference: ok\n";
  }
  std::cout << "all agree\n";
  return 0;
}

int run_recommend(std::uint32_t bits, bool parallel, bool memory_constrained) {
  const Recommendation rec = recommend(bits, parallel, memory_constrained);
  std::cout << "algorithm: " << rec.algorithm << "\n";
  if (!rec.warning.empty()) std::cout << "warning: " << rec.warning << "\n";
  std::cout << "rationale: " << rec.rationale << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-tree construction, filtering and benchmarking"};
  app.require_subcommand(1);

  std::string image_path, out_path, dump_path;
  std::string algo_id = "uf", base_id = "uf", conn_name = "c4";
  std::vector<std::string> algo_ids;
  std::uint32_t bands = 1;
  unsigned workers = 1;
  std::uint64_t area = 1;
  BenchConfig bench;
  bench.algorithms = {"uf", "uf_rank", "uf_levelcomp", "salembier", "nonrec"};
  bench.megapixels = {0.25};
  bench.bit_depths = {8};
  bench.bands = {2};
  bench.workers = {1};
  std::string bench_base = "uf";
  bool no_phases = false;
  std::uint32_t rec_bits = 8;
  bool rec_parallel = false, rec_memory = false;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--conn", conn_name, "Connectivity: c4 or c8")
        ->check(CLI::IsMember({"c4", "c8"}))
        ->capture_default_str();
    cmd->add_option("--bands", bands, "Row bands for the parallel builder")
        ->check(CLI::Range(1u, 1u << 20))
        ->capture_default_str();
    cmd->add_option("--workers", workers, "Worker threads for the parallel builder")
        ->envname("MAXTREE_WORKERS")
        ->check(CLI::Range(1u, 1024u))
        ->capture_default_str();
    cmd->add_option("--base", base_id,
                    "Band builder used when the algorithm is 'parallel'")
        ->capture_default_str();
  };

  CLI::App* build = app.add_subcommand("build", "Build a max-tree and dump it");
  build->add_option("image", image_path, "Input image (.pgm or raw dump)")
      ->required();
  build->add_option("--algo", algo_id, "Algorithm id")->capture_default_str();
  build->add_option("--out", out_path, "Write the tree dump here instead of stdout");
  add_common(build);

  CLI::App* filter = app.add_subcommand("filter", "Area opening of an image");
  filter->add_option("image", image_path, "Input image (.pgm or raw dump)")
      ->required();
  filter->add_option("--area", area, "Keep components of at least this many pixels")
      ->required()
      ->check(CLI::Range(std::uint64_t{1},
                         std::numeric_limits<std::uint64_t>::max()));
  filter->add_option("--algo", algo_id, "Algorithm id")->capture_default_str();
  filter->add_option("-o,--out", out_path, "Output image path")->required();
  add_common(filter);

  CLI::App* bench_cmd = app.add_subcommand("bench", "Timing sweeps as CSV");
  bench_cmd->add_option("--image", image_path,
                        "Base image; omitted: synthetic 1024x1024 8-bit field");
  bench_cmd->add_option("--algos", bench.algorithms,
                        "Algorithm ids to sweep (incl. 'parallel')")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--mp", bench.megapixels, "Target sizes in megapixels")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--bits", bench.bit_depths, "Target bit depths")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--bands", bench.bands, "Band counts (parallel cells)")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd
      ->add_option("--workers", bench.workers, "Worker counts (parallel cells)")
      ->delimiter(',')
      ->envname("MAXTREE_WORKERS")
      ->capture_default_str();
  bench_cmd->add_option("--reps", bench.reps, "Repetitions per cell (median)")
      ->check(CLI::Range(3u, 1000u))
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Seed for image synthesis")
      ->capture_default_str();
  bench_cmd->add_flag("--no-phases", no_phases, "Emit only total rows");
  bench_cmd->add_option("--base", bench_base, "Band builder for 'parallel' cells")
      ->capture_default_str();
  bench_cmd->add_option("--conn", conn_name, "Connectivity: c4 or c8")
      ->check(CLI::IsMember({"c4", "c8"}))
      ->capture_default_str();

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Cross-check builders on an image");
  validate_cmd->add_option("image", image_path, "Input image (.pgm or raw dump)")
      ->required();
  validate_cmd
      ->add_option("--algos", algo_ids,
                   "Algorithm ids to run (default: every builder)")
      ->delimiter(',');
  validate_cmd->add_option("--dump", dump_path,
                           "Also check this tree dump against the image");
  add_common(validate_cmd);

  CLI::App* rec_cmd =
      app.add_subcommand("recommend", "Pick an algorithm for a workload");
  rec_cmd->add_option("--bits", rec_bits, "Bit depth of the data")
      ->required()
      ->check(CLI::Range(1u, kMaxBitDepth));
  rec_cmd->add_flag("--parallel", rec_parallel, "Multiple cores available");
  rec_cmd->add_flag("--memory-constrained", rec_memory,
                    "Minimize working-set size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(build))
      return run_build(image_path, algo_id, base_id, bands, workers, conn_name,
                       out_path);
    if (app.got_subcommand(filter))
      return run_filter(image_path, algo_id, base_id, bands, workers,
                        conn_name, area, out_path);
    if (app.got_subcommand(bench_cmd)) {
      const auto base = algorithm_from_string(bench_base);
      if (!base) {
        std::cerr << "maxtree bench: unknown base algorithm id '" << bench_base
                  << "'; known ids: " << algorithm_id_list(false) << "\n";
        return 2;
      }
      bench.image_path = image_path;
      bench.phase_timing = !no_phases;
      bench.conn = conn_of(conn_name);
      bench.parallel_base = *base;
      run_bench(bench, std::cout, std::cerr);
      return 0;
    }
    if (app.got_subcommand(validate_cmd))
      return run_validate(image_path, algo_ids, base_id, bands, workers,
                          conn_name, dump_path);
    if (app.got_subcommand(rec_cmd))
      return run_recommend(rec_bits, rec_parallel, rec_memory);
  } catch (const std::exception& e) {
    std::cerr << "maxtree: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
