// hsr: command-line front end (gen, viewshed, oracle, verify, stats).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "hsr/errors.hpp"
#include "hsr/io.hpp"
#include "hsr/oracle.hpp"
#include "hsr/pipeline.hpp"
#include "hsr/verify.hpp"

namespace {

using namespace hsr;

std::uint64_t effective_seed(std::uint64_t given) {
  if (const char* env = std::getenv("HSR_SEED"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError(std::string("HSR_SEED is not a number: ") + env);
    }
  }
  return given;
}

Scene load(const std::string& path) {
  const Scene s = read_scene(path).scene();
  check_general_position(s);
  return s;
}

void emit(const std::string& path, const nlohmann::json& j) {
  if (path.empty() || path == "-")
    std::cout << j.dump(1) << '\n';
  else
    write_json(path, j);
}

// The tree points into the padded scene, so both live here and never move.
struct Built {
  explicit Built(const Scene& scene)
      : padded(pad_to_power_of_two(scene)), tree((validate_depth_order(padded.scene), UnionTree::build(padded.scene))) {}
  Built(const Built&) = delete;

  PaddedScene padded;
  UnionTree tree;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hidden surface removal with a succinct union tree"};
  app.require_subcommand(1);

  std::string family, scene_path, out_path, svg_path;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool exact = false, dump = false;

  auto* gen = app.add_subcommand("gen", "generate a scene (random, worst or disjoint)");
  gen->add_option("family", family)->required()->check(CLI::IsMember({"random", "worst", "disjoint"}));
  gen->add_option("n", n)->required()->check(CLI::PositiveNumber);
  gen->add_option("seed", seed, "ignored by the worst family; HSR_SEED overrides it");
  gen->add_option("-o,--out", out_path, "scene file (default: stdout)");

  auto* viewshed = app.add_subcommand("viewshed", "visibility map via the union tree");
  viewshed->add_option("scene", scene_path)->required();
  viewshed->add_option("out", out_path, "map file (default: stdout)");
  viewshed->add_option("--svg", svg_path, "also draw the map");
  viewshed->add_flag("--exact", exact, "exact rational frame coordinates instead of doubles");

  auto* oracle = app.add_subcommand("oracle", "visibility map via the brute-force arrangement");
  oracle->add_option("scene", scene_path)->required();
  oracle->add_option("out", out_path, "map file (default: stdout)");
  oracle->add_flag("--exact", exact, "exact rational frame coordinates instead of doubles");

  auto* verify = app.add_subcommand("verify", "compare the pipeline with the oracle and sweep all nodes");
  verify->add_option("scene", scene_path)->required();

  auto* stats = app.add_subcommand("stats", "space figures of one run");
  stats->add_option("scene", scene_path)->required();
  stats->add_option("out", out_path, "stats file (default: stdout)");
  stats->add_flag("--dump", dump, "print the catalog and level masks to stderr");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      GeneratedScene g;
      if (family == "random")
        g = gen_random(n, effective_seed(seed));
      else if (family == "worst")
        g = gen_worst_case(n);
      else
        g = gen_disjoint(n, effective_seed(seed));
      emit(out_path, scene_to_json(g.viewpoint, g.triangles));
      (out_path.empty() || out_path == "-" ? std::cerr : std::cout) << next_power_of_two(n) << '\n';
    } else if (viewshed->parsed()) {
      const Built b(load(scene_path));
      SpaceStats st = b.tree.stats();
      const VisibilityMap map = compute_visibility(b.tree, &st);
      emit(out_path, map_to_json(map, b.padded.scene, exact));
      if (!svg_path.empty()) {
        std::ofstream svg(svg_path);
        if (!svg) throw ValidationError("cannot write " + svg_path);
        svg << render_svg(map, b.tree.reconstruct(1), b.padded.scene);
      }
    } else if (oracle->parsed()) {
      const Scene s = load(scene_path);
      const PaddedScene padded = pad_to_power_of_two(s);
      emit(out_path, map_to_json(trivial_viewshed(padded.scene), padded.scene, exact));
      (out_path.empty() || out_path == "-" ? std::cerr : std::cout) << "crossings " << count_edge_crossings(s)
                                                                     << '\n';
    } else if (verify->parsed()) {
      const VerifyReport r = verify_scene(load(scene_path));
      std::cout << r.summary() << '\n';
      return r.clean() ? 0 : static_cast<int>(ExitCode::internal);
    } else if (stats->parsed()) {
      const Built b(load(scene_path));
      SpaceStats st = b.tree.stats();
      compute_visibility(b.tree, &st);
      emit(out_path, stats_to_json(st));
      if (dump) std::cerr << b.tree.dump();
    }
  } catch (const Error& e) {
    std::cerr << "hsr: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "hsr: internal error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::internal);
  }
  return 0;
}
