#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stokerlab/deform.hpp"
#include "stokerlab/io.hpp"
#include "stokerlab/repvar.hpp"
#include "stokerlab/rigidity.hpp"

// One function per CLI subcommand. Commands never print; they return the
// report, the exit status and any file they were asked to write.

namespace stokerlab::commands {

using io::Json;

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failed = 1;  // validation failure, not certified, rejected input
inline constexpr int io = 2;      // unreadable or malformed input
inline constexpr int no_convergence = 3;
inline constexpr int convexity_lost = 4;
inline constexpr int ball_exit = 5;
}  // namespace exit_code

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::IoError: return exit_code::io;
    case ErrorKind::NoConvergence: return exit_code::no_convergence;
    case ErrorKind::ConvexityLost: return exit_code::convexity_lost;
    case ErrorKind::BallExit: return exit_code::ball_exit;
    default: return exit_code::failed;
  }
}

struct Outcome {
  io::RunReport report;
  int exit_code = exit_code::ok;
  std::optional<std::string> output;  // polyhedron JSON written by deform

  std::string dump() const { return report.dump(); }
};

namespace detail {

inline Outcome finish(io::RunReport report) {
  const int code = report.all_pass() ? exit_code::ok : exit_code::failed;
  return Outcome{std::move(report), code, std::nullopt};
}

inline Outcome error_outcome(io::RunReport report, const Error& e) {
  report.fail(e.kind(), e.detail());
  return Outcome{std::move(report), exit_code_for(e.kind()), std::nullopt};
}

template <class Body>
Outcome guarded(io::RunReport report, Body&& body) {
  try {
    return body(report);
  } catch (const Error& e) {
    return error_outcome(std::move(report), e);
  }
}

inline EmbeddedPolyhedron load_polyhedron(io::RunReport& report, const std::string& path,
                                          const std::string& role = "polyhedron") {
  const std::string text = io::read_file(path);
  report.add_input(role, path, text);
  return io::parse_polyhedron(text, path);
}

// Loads a polyhedron and requires a valid embedding.
inline EmbeddedPolyhedron load_valid(io::RunReport& report, const std::string& path, const Tolerances& tol) {
  EmbeddedPolyhedron p = load_polyhedron(report, path);
  require_valid_embedding(p, tol);
  return p;
}

inline Json edge_json(const Edge& e) { return Json::array({e.a, e.b}); }

}  // namespace detail

inline Outcome cmd_validate(const std::string& path, const Tolerances& tol) {
  return detail::guarded(io::RunReport("validate", tol), [&](io::RunReport& report) {
    const std::string text = io::read_file(path);
    report.add_input("polyhedron", path, text);
    io::PolyhedronData data = io::parse_polyhedron_data(text, path);
    const int n = static_cast<int>(data.vertices.size());
    const CombinatorialReport comb = validate_combinatorics(n, data.faces);
    Json& c = report.results()["combinatorics"];
    c = {{"ok", comb.ok},
         {"vertices", comb.vertex_count},
         {"edges", comb.edge_count},
         {"faces", comb.face_count},
         {"euler_characteristic", comb.euler_characteristic},
         {"violations", comb.violations}};
    for (const std::string& v : comb.violations) report.fail(ErrorKind::InvalidCombinatorics, v);
    if (!comb.ok) return detail::finish(std::move(report));

    const EmbeddedPolyhedron p(CombinatorialType::from_faces(n, std::move(data.faces)), std::move(data.vertices));
    const EmbeddingReport emb = validate_embedding(p, tol);
    Json issues = Json::array();
    for (const EmbeddingIssue& i : emb.issues) {
      issues.push_back({{"kind", std::string(to_string(i.kind))}, {"message", i.message}});
      report.fail(i.kind, i.message);
    }
    report.results()["embedding"] = {{"ok", emb.ok},
                                     {"max_vertex_norm", emb.max_vertex_norm},
                                     {"max_planarity_residual", emb.max_planarity_residual},
                                     {"min_convexity_margin", emb.min_convexity_margin},
                                     {"issues", issues}};
    report.verdict("max_vertex_norm", emb.max_vertex_norm, "<", 1.0 - tol.ball);
    report.verdict("max_planarity_residual", emb.max_planarity_residual, "<=", tol.planar);
    report.verdict("min_convexity_margin", emb.min_convexity_margin, ">", tol.convex);
    return detail::finish(std::move(report));
  });
}

inline Outcome cmd_angles(const std::string& path, const Tolerances& tol) {
  return detail::guarded(io::RunReport("angles", tol), [&](io::RunReport& report) {
    const EmbeddedPolyhedron p = detail::load_valid(report, path, tol);
    const AngleVector a = dihedral_angles(p, tol);
    Json table = Json::array();
    for (int e = 0; e < p.comb().edge_count(); ++e)
      table.push_back({{"edge", e}, {"vertices", detail::edge_json(p.comb().edge(e))}, {"angle", a(e)}});
    report.results()["angles"] = table;
    return detail::finish(std::move(report));
  });
}

inline Outcome cmd_rigidity(const std::string& path, const Tolerances& tol) {
  return detail::guarded(io::RunReport("rigidity", tol), [&](io::RunReport& report) {
    const EmbeddedPolyhedron p = detail::load_polyhedron(report, path);
    const EmbeddingReport emb = validate_embedding(p, tol);
    for (const EmbeddingIssue& i : emb.issues) report.fail(i.kind, i.message);
    const RigidityReport r = rigidity_report(p, tol);
    Json& out = report.results()["rigidity"];
    out = {{"edges", r.edge_count},
           {"tangent_dim", r.tangent_dim},
           {"angle_rank", r.angle_rank},
           {"kernel_dim", r.kernel_dim},
           {"isometry_containment_residual", r.isometry_containment_residual},
           {"gap_lower", r.gap_lower},
           {"gap_upper", r.gap_upper},
           {"singular_values", io::vector_json(r.singular_values)},
           {"certified", r.certified}};
    if (r.failure) report.fail(*r.failure, r.failure_message);
    report.verdict("tangent_dim", r.tangent_dim, "==", r.edge_count + 6);
    report.verdict("angle_rank", r.angle_rank, "==", r.edge_count);
    report.verdict("kernel_dim", r.kernel_dim, "==", 6);
    report.verdict("isometry_containment_residual", r.isometry_containment_residual, "<", tol.principal_angle);
    return detail::finish(std::move(report));
  });
}

struct DeformRequest {
  std::string path;
  std::optional<std::string> target_path;
  std::optional<double> perturb;
  std::uint64_t seed = 0;
  int steps = 1;
  std::optional<std::string> output_path;
  DeformOptions options;
};

/// Uniform perturbation in [-eps, eps] per edge from std::mt19937_64(seed).
inline AngleVector perturbed_angles(const AngleVector& angles, double eps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-eps, eps);
  AngleVector out = angles;
  for (Eigen::Index e = 0; e < out.size(); ++e) out(e) += dist(rng);
  return out;
}

inline Outcome cmd_deform(const DeformRequest& req, const Tolerances& tol) {
  return detail::guarded(io::RunReport("deform", tol), [&](io::RunReport& report) {
    Json& cfg = report.config();
    cfg["steps"] = req.steps;
    cfg["max_iterations"] = req.options.max_iterations;
    cfg["residual_tol"] = req.options.residual_tol;
    cfg["trust_radius"] = req.options.trust_radius;
    if (req.perturb) {
      cfg["perturb"] = *req.perturb;
      cfg["seed"] = req.seed;
      cfg["generator"] = "mt19937_64 + uniform_real_distribution";
    }
    if (req.target_path.has_value() == req.perturb.has_value())
      throw Error(ErrorKind::InvalidTarget, "give exactly one of --target and --perturb");

    const EmbeddedPolyhedron p = detail::load_valid(report, req.path, tol);
    const AngleVector start = dihedral_angles(p, tol);
    AngleVector target;
    if (req.target_path) {
      const std::string text = io::read_file(*req.target_path);
      report.add_input("target", *req.target_path, text);
      const std::vector<double> t = io::parse_angles(text, *req.target_path);
      target = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
    } else {
      target = perturbed_angles(start, *req.perturb, req.seed);
    }
    report.results()["start_angles"] = io::vector_json(start);
    report.results()["target_angles"] = io::vector_json(target);

    const PathResult path = continuation_path(p, target, req.steps, req.options, tol);
    Json waypoints = Json::array();
    for (const DeformResult& w : path.waypoints)
      waypoints.push_back({{"iterations", w.iterations_used}, {"residual_history", w.residual_history}});
    report.results()["waypoints"] = waypoints;
    if (!path.ok()) {
      report.results()["failed_waypoint"] = path.failure->waypoint;
      throw Error(path.failure->kind, path.failure->message);
    }
    const DeformResult& last = path.waypoints.back();
    report.results()["gauge"] = last.gauge;
    report.results()["achieved_angles"] = io::vector_json(last.achieved_angles);
    report.verdict("angle_error", stokerlab::detail::sup_norm(last.achieved_angles - target), "<", 1e-10);
    report.verdict("planarity_residual", stokerlab::detail::sup_norm(planarity_residuals(last.final)), "<", 1e-11);
    report.verdict("min_convexity_margin", convexity_margins(last.final).minCoeff(), ">", tol.convex);

    // Deforming back to the start angles must recover the original up to isometry.
    const DeformResult back = realize_angles(last.final, start, req.options, tol);
    const EmbeddedPolyhedron original = gauge_fix(p, tol);
    double drift = 0.0;
    for (int v = 0; v < p.vertex_count(); ++v)
      drift = std::max(drift, (back.final.positions[v] - original.positions[v]).cwiseAbs().maxCoeff());
    report.results()["round_trip"] = {{"iterations", back.iterations_used}, {"vertex_drift", drift}};
    report.verdict("round_trip_vertex_drift", drift, "<", 1e-8);

    const std::string emitted = io::emit_polyhedron(last.final);
    if (req.output_path) io::write_file(*req.output_path, emitted);
    Outcome out = detail::finish(std::move(report));
    out.output = emitted;
    return out;
  });
}

inline Outcome cmd_holonomy(const std::string& path, const Tolerances& tol) {
  return detail::guarded(io::RunReport("holonomy", tol), [&](io::RunReport& report) {
    const EmbeddedPolyhedron p = detail::load_valid(report, path, tol);
    const CombinatorialType& c = p.comb();
    Json edges = Json::array();
    for (int e = 0; e < c.edge_count(); ++e) {
      const MeridianHolonomy m = meridian_holonomy(p, e, tol);
      const double trace = std::abs(m.lift.trace());
      const double defect = std::abs(trace - 2.0 * std::abs(std::cos(m.dihedral_angle)));
      edges.push_back({{"edge", e},
                       {"vertices", detail::edge_json(c.edge(e))},
                       {"dihedral_angle", m.dihedral_angle},
                       {"abs_trace", trace},
                       {"trace_identity_defect", defect}});
      report.verdict("trace_identity_edge_" + std::to_string(e), defect, "<", 1e-9);
    }
    Json vertices = Json::array();
    for (int v = 0; v < c.vertex_count(); ++v) {
      const LinkRepresentation link = link_representation(p, v, tol);
      int sign = 1;
      const double residual =
          stokerlab::detail::distance_to_plus_minus_identity(evaluate_word(link.representation(),
                                                                           link.presentation().relators[0]),
                                                             &sign);
      const IrreducibilityResult irr = irreducibility_check(link.representation(), tol);
      vertices.push_back({{"vertex", v},
                          {"valence", link.valence()},
                          {"relation_residual", residual},
                          {"relation_sign", sign},
                          {"irreducible", irr.irreducible},
                          {"irreducibility_residual", irr.residual}});
      report.verdict("relation_vertex_" + std::to_string(v), residual, "<", tol.relator);
      report.verdict("irreducible_vertex_" + std::to_string(v), irr.residual, ">=", tol.irreducible);
    }
    report.results()["edges"] = edges;
    report.results()["vertices"] = vertices;
    return detail::finish(std::move(report));
  });
}

struct TraceRankRequest {
  std::optional<std::string> presentation_path;
  std::optional<std::string> matrices_path;
  std::optional<std::string> link_path;  // polyhedron; use the link of `vertex`
  int vertex = 0;
  std::optional<std::string> surface_path;  // polyhedron; use its boundary surface group
  bool unitary = false;
};

inline Json trace_rank_json(const TraceRankReport& t) {
  return {{"unitary", t.unitary},
          {"loops", t.loop_count},
          {"z1_dim", t.z1_dim},
          {"b1_dim", t.b1_dim},
          {"h1_dim", t.h1_dim},
          {"rank", t.rank},
          {"gap_ratio", t.gap_ratio},
          {"singular_values", io::vector_json(t.singular_values)}};
}

inline Outcome cmd_tracerank(const TraceRankRequest& req, const Tolerances& tol) {
  return detail::guarded(io::RunReport("tracerank", tol), [&](io::RunReport& report) {
    report.config()["unitary"] = req.unitary;
    const int sources = req.link_path.has_value() + req.surface_path.has_value() + req.matrices_path.has_value();
    if (sources != 1) throw Error(ErrorKind::IoError, "give exactly one of --link, --surface, --matrices");

    Presentation pres;
    Representation rho;
    std::vector<Word> loops;
    std::optional<int> expected_h1, expected_rank;
    if (req.link_path) {
      const EmbeddedPolyhedron p = detail::load_valid(report, *req.link_path, tol);
      const LinkRepresentation link = link_representation(p, req.vertex, tol);
      report.config()["vertex"] = req.vertex;
      pres = link.presentation();
      rho = link.representation();
      loops = link.meridian_loops();
      const int d = link.valence();
      expected_h1 = req.unitary ? 3 * d - 6 : 6 * d - 12;
      expected_rank = req.unitary ? d : 2 * d;
    } else if (req.surface_path) {
      if (req.unitary) throw Error(ErrorKind::NotUnitary, "surface holonomy is not SU(2)-valued");
      const EmbeddedPolyhedron p = detail::load_valid(report, *req.surface_path, tol);
      const SurfaceGroup s = boundary_surface_group(p, tol);
      pres = s.presentation;
      rho = s.representation;
      loops = s.edge_loops;
      report.results()["genus"] = s.genus;
      report.results()["coordinate_count"] = s.coordinate_count;
      expected_h1 = 12 * s.genus - 12;
      expected_rank = 2 * p.comb().edge_count();
    } else {
      if (!req.presentation_path) throw Error(ErrorKind::IoError, "--matrices needs a presentation file");
      const std::string ptext = io::read_file(*req.presentation_path);
      report.add_input("presentation", *req.presentation_path, ptext);
      const io::PresentationFile file = io::parse_presentation(ptext, *req.presentation_path);
      const std::string mtext = io::read_file(*req.matrices_path);
      report.add_input("matrices", *req.matrices_path, mtext);
      pres = file.presentation;
      rho = io::parse_matrices(mtext, *req.matrices_path);
      loops = file.loops;
      if (loops.empty())
        for (int g = 1; g <= pres.generator_count; ++g) loops.push_back({g});
    }

    report.results()["generators"] = pres.generator_count;
    report.results()["relators"] = pres.relators.size();
    const RepresentationCheck check = check_representation(rho, pres, tol);
    report.results()["representation"] = {{"max_det_defect", check.max_det_defect},
                                          {"max_relator_residual", check.max_relator_residual},
                                          {"relator_signs", check.relator_signs}};
    for (const std::string& issue : check.issues) report.fail(ErrorKind::InvalidRepresentation, issue);
    if (!check.ok) return detail::finish(std::move(report));

    const TraceRankReport t = trace_rank(rho, pres, loops, req.unitary, tol);
    report.results()["trace_rank"] = trace_rank_json(t);
    if (expected_h1) {
      report.results()["expected"] = {{"h1_dim", *expected_h1}, {"rank", *expected_rank}};
      report.verdict("h1_dim", t.h1_dim, "==", *expected_h1);
      report.verdict("rank", t.rank, "==", *expected_rank);
    }
    if (t.rank > 0) report.verdict("gap_ratio", t.gap_ratio, ">", 1e3);
    return detail::finish(std::move(report));
  });
}

/// Writes the boundary-surface presentation (meridian loops included) and
/// its holonomy matrices in the file formats read by `cmd_tracerank`.
inline Outcome cmd_surface(const std::string& path, const std::string& presentation_out,
                           const std::string& matrices_out, const Tolerances& tol) {
  return detail::guarded(io::RunReport("surface", tol), [&](io::RunReport& report) {
    const EmbeddedPolyhedron p = detail::load_valid(report, path, tol);
    const SurfaceGroup s = boundary_surface_group(p, tol);
    io::write_file(presentation_out, "# boundary surface of genus " + std::to_string(s.genus) + "\n" +
                                         io::emit_presentation({s.presentation, s.edge_loops}));
    io::write_file(matrices_out, io::emit_matrices(s.representation));
    report.results()["genus"] = s.genus;
    report.results()["generators"] = s.presentation.generator_count;
    report.results()["relators"] = s.presentation.relators.size();
    report.results()["euler_characteristic"] = s.presentation.euler_characteristic();
    report.verdict("euler_characteristic", s.presentation.euler_characteristic(), "==", 2 - 2 * s.genus);
    return detail::finish(std::move(report));
  });
}

}  // namespace stokerlab::commands
