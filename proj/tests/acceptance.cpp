// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "stokerlab/deform.hpp"
#include "stokerlab/fixtures.hpp"
#include "stokerlab/repvar.hpp"

using namespace stokerlab;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream notes;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (ok) notes << what;
      ok = false;
    }
  }
};

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double vertex_gap(const EmbeddedPolyhedron& a, const EmbeddedPolyhedron& b) {
  double d = 0.0;
  for (int v = 0; v < a.vertex_count(); ++v) d = std::max(d, (a.positions[v] - b.positions[v]).cwiseAbs().maxCoeff());
  return d;
}

std::vector<fixtures::Fixture> rigidity_fixtures() {
  return {fixtures::tetrahedron(), fixtures::triangular_prism(), fixtures::cube(), fixtures::pentagonal_pyramid()};
}

void rigidity(Check& c, std::ostringstream& summary) {
  double worst_lower = 1.0, worst_upper = 0.0, worst_angle = 0.0;
  for (const auto& f : rigidity_fixtures())
    for (double s : {0.1, 0.3, 0.5}) {
      const RigidityReport r = rigidity_report(f.at_scale(s));
      const int e = f.combinatorics.edge_count();
      const std::string tag = f.name + "@" + std::to_string(s) + ": ";
      c.require(r.tangent_dim == e + 6, tag + "tangent_dim");
      c.require(r.angle_rank == e, tag + "angle_rank");
      c.require(r.kernel_dim == 6, tag + "kernel_dim");
      c.require(r.isometry_containment_residual < 1e-6, tag + "principal angle");
      c.require(r.gap_lower > 1e-6, tag + "sigma_E/sigma_1");
      c.require(r.gap_upper < 1e-9, tag + "sigma_E+1/sigma_1");
      worst_lower = std::min(worst_lower, r.gap_lower);
      worst_upper = std::max(worst_upper, r.gap_upper);
      worst_angle = std::max(worst_angle, r.isometry_containment_residual);
    }
  summary << "12 cases; min sigma_E/sigma_1 " << worst_lower << ", max sigma_E+1/sigma_1 " << worst_upper
          << ", max principal angle " << worst_angle;
}

void local_deformation(Check& c, std::ostringstream& summary) {
  int worst_successes = 100, max_iterations = 0;
  double worst_drift = 0.0;
  for (const auto& f : fixtures::all()) {
    const EmbeddedPolyhedron p = f.at_scale(0.5);
    const AngleVector start = dihedral_angles(p);
    const EmbeddedPolyhedron reference = gauge_fix(p);
    std::mt19937_64 rng(1000 + f.combinatorics.edge_count());
    std::uniform_real_distribution<double> delta(-1e-3, 1e-3);
    int successes = 0;
    for (int run = 0; run < 100; ++run) {
      AngleVector target = start;
      for (Eigen::Index e = 0; e < target.size(); ++e) target(e) += delta(rng);
      try {
        const DeformResult r = realize_angles(p, target);
        const DeformResult back = realize_angles(r.final, start);
        const double drift = vertex_gap(back.final, reference);
        worst_drift = std::max(worst_drift, drift);
        max_iterations = std::max(max_iterations, r.iterations_used);
        if (r.iterations_used <= 20 && max_abs(dihedral_angles(r.final) - target) < 1e-10 &&
            max_abs(planarity_residuals(r.final)) < 1e-11 && convexity_margins(r.final).minCoeff() > 0.0 &&
            drift < 1e-8)
          ++successes;
      } catch (const Error&) {
      }
    }
    c.require(successes >= 99, f.name + ": " + std::to_string(successes) + "/100");
    worst_successes = std::min(worst_successes, successes);
  }
  summary << "5 fixtures x 100 runs; min successes " << worst_successes << "/100, max iterations " << max_iterations
          << ", max round-trip drift " << worst_drift;
}

void holonomy(Check& c, std::ostringstream& summary) {
  double worst_trace = 0.0, worst_relation = 0.0, weakest = 1e300;
  int edges = 0, vertices = 0;
  for (const auto& f : fixtures::all()) {
    const EmbeddedPolyhedron p = f.at_scale(0.5);
    for (int e = 0; e < p.comb().edge_count(); ++e, ++edges) {
      const MeridianHolonomy m = meridian_holonomy(p, e);
      const double defect = std::abs(std::abs(m.lift.trace()) - 2.0 * std::abs(std::cos(m.dihedral_angle)));
      worst_trace = std::max(worst_trace, defect);
      c.require(defect < 1e-9, f.name + ": trace identity");
    }
    for (int v = 0; v < p.vertex_count(); ++v, ++vertices) {
      const LinkRepresentation link = link_representation(p, v);
      Word product;
      for (int k = 1; k <= link.valence(); ++k) product.push_back(k);
      const double relation = detail::distance_to_plus_minus_identity(evaluate_word(link.representation(), product));
      worst_relation = std::max(worst_relation, relation);
      c.require(relation < 1e-8, f.name + ": vertex relation");
      const IrreducibilityResult irr = irreducibility_check(link.representation());
      weakest = std::min(weakest, irr.residual);
      c.require(irr.irreducible, f.name + ": reducible link");
    }
  }
  summary << edges << " edges, " << vertices << " vertices; max trace defect " << worst_trace
          << ", max relation residual " << worst_relation << ", min irreducibility residual " << weakest;
}

void link_ranks(Check& c, std::ostringstream& summary) {
  struct Case {
    fixtures::Fixture f;
    int vertex;
  };
  const std::vector<Case> cases = {{fixtures::tetrahedron(), 0}, {fixtures::octahedron(), 0},
                                   {fixtures::pentagonal_pyramid(), 5}};
  double weakest_gap = 1e300;
  for (const Case& k : cases) {
    const LinkRepresentation link = link_representation(k.f.at_scale(0.5), k.vertex);
    const int d = link.valence();
    for (bool unitary : {true, false}) {
      const TraceRankReport t = trace_rank(link.representation(), link.presentation(), link.meridian_loops(), unitary);
      const int h1 = unitary ? 3 * d - 6 : 6 * d - 12;
      const int rank = unitary ? d : 2 * d;
      const std::string tag = "d=" + std::to_string(d) + (unitary ? " unitary" : " full");
      c.require(t.h1_dim == h1, tag + ": H1 dim " + std::to_string(t.h1_dim));
      c.require(t.rank == rank, tag + ": rank " + std::to_string(t.rank));
      c.require(t.gap_ratio > 1e3, tag + ": gap ratio");
      weakest_gap = std::min(weakest_gap, t.gap_ratio);
    }
  }
  summary << "d = 3, 4, 5 (tetrahedron, octahedron, pentagonal pyramid apex); min gap ratio " << weakest_gap;
}

void surface_dimension(Check& c, std::ostringstream& summary) {
  const SurfaceGroup s = boundary_surface_group(fixtures::tetrahedron().at_scale(0.5));
  const TraceRankReport t = trace_rank(s.representation, s.presentation, s.edge_loops, false);
  c.require(s.genus == 3, "genus");
  c.require(t.h1_dim == 24 && t.h1_dim == t.z1_dim - t.b1_dim, "H1 dim " + std::to_string(t.h1_dim));
  c.require(t.h1_dim == 12 * s.genus - 12, "12g-12");
  c.require(s.coordinate_count == 24, "coordinate count");
  c.require(t.loop_count == 6 && t.rank == 12, "trace rank " + std::to_string(t.rank));
  c.require(t.gap_ratio > 1e3, "gap ratio");
  summary << "genus " << s.genus << ", dim Z1 " << t.z1_dim << " - dim B1 " << t.b1_dim << " = " << t.h1_dim
          << ", trace rank " << t.rank << " of " << 2 * t.loop_count << ", gap ratio " << t.gap_ratio;
}

void oracle_agreement(Check& c, std::ostringstream& summary) {
  std::mt19937_64 rng(606);
  const auto all = fixtures::all();
  const auto basis = so31_basis();
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), scale(0.2, 0.7);
  double worst_constraint = 0.0, worst_angle = 0.0, worst_trace = 0.0;
  for (int run = 0; run < 50; ++run) {
    const auto& f = all[pick(rng)];
    EmbeddedPolyhedron p = f.at_scale(scale(rng));
    Isometry g = Isometry::identity();
    for (int k = 0; k < 6; ++k) g = g * basis[k].exp(0.2 * unit(rng));
    p = p.transformed(g);
    for (Vec3& x : p.positions) x += 1e-3 * Vec3(unit(rng), unit(rng), unit(rng));
    const Eigen::VectorXd x0 = p.coordinates();
    const Matrix jc = constraint_jacobian(p);
    if (jc.size()) {
      const Matrix fd = oracle::fd_jacobian(
          [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(planarity_residuals(p.with_coordinates(x))); }, x0,
          1e-6);
      worst_constraint = std::max(worst_constraint, (jc - fd).cwiseAbs().maxCoeff());
    }
    const Matrix fd = oracle::fd_jacobian(
        [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(dihedral_angles(p.with_coordinates(x))); }, x0, 1e-6);
    worst_angle = std::max(worst_angle, (angle_jacobian(p) - fd).cwiseAbs().maxCoeff());
  }
  for (int run = 0; run < 50; ++run) {
    const int gens = 2 + run % 3;
    Representation rho;
    Cocycle u;
    for (int g = 0; g < gens; ++g) {
      rho.images.push_back(oracle::random_sl2(rng, 0.7));
      u.values.push_back(oracle::random_traceless(rng));
    }
    const Word w = oracle::random_word(rng, gens, 3 + run % 5);
    const auto traced = [&](double t) {
      std::vector<Mat2c> moved;
      for (int g = 0; g < gens; ++g) moved.push_back(oracle::exp_traceless(t * u.values[g]) * rho.images[g]);
      return oracle::fold_word(moved, w).trace();
    };
    const double h = 1e-6;
    const Complex fd = (traced(h) - traced(-h)) / (2 * h);
    worst_trace = std::max(worst_trace, std::abs(fd - trace_differential(rho, u, w)));
  }
  c.require(worst_constraint < 1e-6, "constraint Jacobian");
  c.require(worst_angle < 1e-6, "angle Jacobian");
  c.require(worst_trace < 1e-6, "trace differential");
  summary << "50 polyhedra, 50 trace curves; max deviation constraint " << worst_constraint << ", angle "
          << worst_angle << ", trace " << worst_trace;
}

void coboundary_cross_check(Check& c, std::ostringstream& summary) {
  std::mt19937_64 rng(707);
  double worst = 0.0;
  int representations = 0;
  for (const auto& f : fixtures::all()) {
    const EmbeddedPolyhedron p = f.at_scale(0.5);
    std::vector<std::pair<Representation, std::vector<Word>>> reps;
    for (int v = 0; v < p.vertex_count(); ++v) {
      const LinkRepresentation link = link_representation(p, v);
      reps.emplace_back(link.representation(), link.meridian_loops());
    }
    for (const auto& [rho, loops] : reps) {
      if (!irreducibility_check(rho).irreducible) continue;
      ++representations;
      c.require(coboundary_space(rho).dimension() == 6, f.name + ": coboundary dim");
    }
    for (int run = 0; run < 100; ++run) {
      const auto& [rho, loops] = reps[run % reps.size()];
      const Cocycle u = coboundary(oracle::random_traceless(rng), rho);
      std::vector<Word> words = loops;
      words.push_back(oracle::random_word(rng, rho.generator_count(), 6));
      for (const Word& w : words) worst = std::max(worst, std::abs(trace_differential(rho, u, w)));
    }
  }
  c.require(worst < 1e-10, "trace differential on coboundaries");
  summary << "500 coboundaries; max |d tr| " << worst << "; " << representations
          << " irreducible link representations with dim B1 = 6";
}

}  // namespace

int main() {
  const std::vector<std::tuple<const char*, double, std::function<void(Check&, std::ostringstream&)>>> criteria = {
      {"1 rigidity certification", 5.0, rigidity},
      {"2 constructive local deformation", 60.0, local_deformation},
      {"3 holonomy identities", 0.0, holonomy},
      {"4 link trace ranks", 0.0, link_ranks},
      {"5 surface group dimension", 10.0, surface_dimension},
      {"6 oracle agreement", 0.0, oracle_agreement},
      {"7 coboundary cross-check", 0.0, coboundary_cross_check},
  };
  bool all_ok = true;
  for (const auto& [name, budget, body] : criteria) {
    Check c;
    std::ostringstream summary;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(c, summary);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget > 0.0) c.require(seconds < budget, "over time budget");
    all_ok = all_ok && c.ok;
    std::printf("%s criterion %s (%.2f s): %s%s%s\n", c.ok ? "PASS" : "FAIL", name, seconds, summary.str().c_str(),
                c.ok ? "" : " | ", c.notes.str().c_str());
  }
  return all_ok ? 0 : 1;
}
