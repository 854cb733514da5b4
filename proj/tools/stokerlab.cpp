#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "stokerlab/commands.hpp"
#include "stokerlab/fixtures.hpp"

using namespace stokerlab;

namespace {

int emit(const commands::Outcome& out) {
  std::cout << out.dump();
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for dihedral-angle rigidity of hyperbolic polyhedra"};
  app.require_subcommand(1);
  const Tolerances tol = tolerances_from_environment();

  std::string path;
  auto* validate = app.add_subcommand("validate", "Check combinatorics and embedding of a polyhedron");
  validate->add_option("polyhedron", path, "Polyhedron JSON")->required();
  auto* angles = app.add_subcommand("angles", "Dihedral angle per edge");
  angles->add_option("polyhedron", path, "Polyhedron JSON")->required();
  auto* rigidity = app.add_subcommand("rigidity", "Certify infinitesimal rigidity relative to angles");
  rigidity->add_option("polyhedron", path, "Polyhedron JSON")->required();
  auto* holonomy = app.add_subcommand("holonomy", "Meridian traces, vertex relations, link irreducibility");
  holonomy->add_option("polyhedron", path, "Polyhedron JSON")->required();

  commands::DeformRequest deform_req;
  std::string target, output;
  double perturb = 0.0;
  auto* deform = app.add_subcommand("deform", "Deform to prescribed dihedral angles");
  deform->add_option("polyhedron", deform_req.path, "Polyhedron JSON")->required();
  auto* target_opt = deform->add_option("--target", target, "Angles JSON file");
  auto* perturb_opt = deform->add_option("--perturb", perturb, "Uniform random perturbation size");
  target_opt->excludes(perturb_opt);
  deform->add_option("--seed", deform_req.seed, "Seed for mt19937_64")->needs(perturb_opt);
  deform->add_option("--steps", deform_req.steps, "Continuation waypoints")->check(CLI::PositiveNumber);
  deform->add_option("--max-iterations", deform_req.options.max_iterations)->check(CLI::PositiveNumber);
  deform->add_option("--output", output, "Write the final polyhedron JSON here");

  commands::TraceRankRequest tr_req;
  std::string presentation, matrices, link, surface;
  auto* tracerank = app.add_subcommand("tracerank", "Trace-coordinate rank on H^1");
  tracerank->add_option("presentation", presentation, "Presentation text file (with --matrices)");
  tracerank->add_option("--matrices", matrices, "Generator images JSON");
  tracerank->add_option("--link", link, "Polyhedron JSON; use the link of --vertex");
  tracerank->add_option("--vertex", tr_req.vertex, "Vertex index for --link");
  tracerank->add_option("--surface", surface, "Polyhedron JSON; use its boundary surface group");
  tracerank->add_flag("--unitary", tr_req.unitary, "Restrict cocycles to su(2)");

  std::string surface_poly, surface_pres, surface_mats;
  auto* surface_cmd = app.add_subcommand("surface", "Export the boundary-surface presentation and holonomy");
  surface_cmd->add_option("polyhedron", surface_poly, "Polyhedron JSON")->required();
  surface_cmd->add_option("--presentation", surface_pres, "Output presentation file")->required();
  surface_cmd->add_option("--matrices", surface_mats, "Output matrices JSON")->required();

  std::string fixture_name;
  double scale = 0.5;
  auto* fixture = app.add_subcommand("fixture", "Print a built-in fixture as polyhedron JSON");
  fixture->add_option("name", fixture_name, "tetrahedron | prism | cube | pentagonal_pyramid | octahedron")
      ->required();
  fixture->add_option("--scale", scale, "Largest vertex norm")->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : commands::exit_code::io;
  }

  if (*validate) return emit(commands::cmd_validate(path, tol));
  if (*angles) return emit(commands::cmd_angles(path, tol));
  if (*rigidity) return emit(commands::cmd_rigidity(path, tol));
  if (*holonomy) return emit(commands::cmd_holonomy(path, tol));
  if (*deform) {
    if (*target_opt) deform_req.target_path = target;
    if (*perturb_opt) deform_req.perturb = perturb;
    if (!output.empty()) deform_req.output_path = output;
    return emit(commands::cmd_deform(deform_req, tol));
  }
  if (*tracerank) {
    if (!presentation.empty()) tr_req.presentation_path = presentation;
    if (!matrices.empty()) tr_req.matrices_path = matrices;
    if (!link.empty()) tr_req.link_path = link;
    if (!surface.empty()) tr_req.surface_path = surface;
    return emit(commands::cmd_tracerank(tr_req, tol));
  }
  if (*surface_cmd) return emit(commands::cmd_surface(surface_poly, surface_pres, surface_mats, tol));
  if (*fixture) {
    try {
      std::cout << io::emit_polyhedron(fixtures::by_name(fixture_name).at_scale(scale, tol));
      return commands::exit_code::ok;
    } catch (const Error& e) {
      std::cerr << e.what() << "\n";
      return commands::exit_code_for(e.kind());
    }
  }
  return commands::exit_code::io;
}
