#include <catch2/catch_amalgamated.hpp>

#include "curveflow/flow.hpp"
#include "curveflow/reference.hpp"
#include "oracles.hpp"

using namespace curveflow;

namespace {

Real mean_radius(const DiscreteCurve& g) {
  Real cx = 0, cy = 0;
  const std::size_t n = g.total_nodes();
  for (std::size_t i = 0; i < n; ++i) {
    cx += g.pts[i * g.dim];
    cy += g.pts[i * g.dim + 1];
  }
  cx /= static_cast<Real>(n);
  cy /= static_cast<Real>(n);
  Real r = 0;
  for (std::size_t i = 0; i < n; ++i)
    r += std::hypot(g.pts[i * g.dim] - cx, g.pts[i * g.dim + 1] - cy);
  return r / static_cast<Real>(n);
}

// distance from point to the segment [a, b]
Real point_segment_dist(Real px, Real py, Real ax, Real ay, Real bx, Real by) {
  Real vx = bx - ax, vy = by - ay;
  Real L2 = vx * vx + vy * vy;
  Real t = L2 > 0 ? ((px - ax) * vx + (py - ay) * vy) / L2 : 0;
  t = std::clamp(t, Real(0), Real(1));
  return std::hypot(px - (ax + t * vx), py - (ay + t * vy));
}

Real dist_to_polyline(const DiscreteCurve& g, Real px, Real py) {
  Real best = 1e300;
  const std::size_t n = g.total_nodes();
  std::size_t last = g.ends == EndCondition::Periodic ? n : n - 1;
  for (std::size_t i = 0; i < last; ++i) {
    std::size_t j = (i + 1) % n;
    best = std::min(best, point_segment_dist(px, py, g.pts[i * g.dim], g.pts[i * g.dim + 1],
                                             g.pts[j * g.dim], g.pts[j * g.dim + 1]));
  }
  return best;
}

// one-sided Hausdorff distance between interior node sets and polylines
Real hausdorff(const DiscreteCurve& a, const DiscreteCurve& b) {
  Real worst = 0;
  for (std::size_t i = a.interior_begin(); i < a.interior_end(); ++i)
    worst = std::max(worst, dist_to_polyline(b, a.pts[i * a.dim], a.pts[i * a.dim + 1]));
  for (std::size_t i = b.interior_begin(); i < b.interior_end(); ++i)
    worst = std::max(worst, dist_to_polyline(a, b.pts[i * b.dim], b.pts[i * b.dim + 1]));
  return worst;
}

DiscreteCurve circle(Real r, int nodes) {
  ReferenceCurveSpec spec;
  spec.kind = ReferenceCurveSpec::Kind::Circle;
  spec.radius = r;
  spec.nodes = nodes;
  return build_reference(spec);
}

}  // namespace

TEST_CASE("flow presets map to the documented coefficient sets") {
  auto csf = flow_preset("csf");
  CHECK(csf.sigma == 0);
  CHECK(csf.lambda == 1);
  CHECK(csf.order() == 2);
  auto sdf = flow_preset("sdf");
  CHECK(sdf.sigma == 1);
  CHECK(sdf.lambda == 0);
  CHECK(sdf.mu == 0);
  CHECK(sdf.order() == 4);
  auto chen = flow_preset("chen");
  CHECK(chen.mu == 1);
  CHECK(chen.vartheta == 3);
  auto el = flow_preset("elastic", 0.25);
  CHECK(el.lambda == 0.25);
  CHECK(el.mu == -0.5);
  auto fel = flow_preset("free-elastic");
  CHECK(fel.lambda == 0);
  CHECK(fel.mu == -0.5);
  CHECK_THROWS_AS(flow_preset("nosuch"), InvalidInput);
}

TEST_CASE("velocity of a circle under the second-order law is radial") {
  auto g = circle(2, 128);
  auto f = compute_fields(g);
  auto v = velocity(g, f, flow_preset("csf"));
  // |V| = |κ| = 1/2 pointing inward; tangential coefficient vanishes
  for (std::size_t i = 0; i < g.total_nodes(); ++i) {
    std::span<const Real> vi(v.full.data() + i * 2, 2);
    std::span<const Real> pi(g.pts.data() + i * 2, 2);
    CHECK(std::abs(norm(vi) - 0.5) < 1e-12);
    CHECK(std::abs(dot(vi, pi) + 1.0) < 1e-12);  // <V, γ> = -r |κ| = -1
    CHECK(std::abs(v.xi[i]) < 1e-13);
  }
  CHECK(std::abs(v.sup - 0.5) < 1e-12);
}

TEST_CASE("a circle shrinks at the exact rate under the second-order law") {
  auto g = circle(1, 256);
  SolverConfig cfg;
  cfg.t_end = 0.1;
  cfg.dt_max = 1e-4;
  cfg.cfl = 10;  // fixed dt: the velocity cap stays inactive
  cfg.snapshot_stride = 200;
  cfg.resample_every = 10;
  auto traj = simulate(g, flow_preset("csf"), cfg);
  REQUIRE(traj.termination == Termination::ReachedEnd);
  for (const auto& snap : traj.snapshots) {
    std::size_t idx = &snap - traj.snapshots.data();
    Real t = traj.stats[idx].t;
    Real expect = oracle::circle_csf_radius(1, t);
    CHECK(std::abs(mean_radius(snap) - expect) < 1e-3 * expect);
  }
  // dissipation identity: energy drop matches the time-integrated squared speed
  Real defect_sum = 0;
  Real prev = traj.initial_energy;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    defect_sum += std::abs(traj.energy_series[k] - prev + traj.dts[k] * traj.v_l2_sq[k]);
    prev = traj.energy_series[k];
  }
  Real drop = traj.initial_energy - traj.energy_series.back();
  CHECK(drop > 0);
  CHECK(defect_sum < 0.01 * drop);
}

TEST_CASE("a circle is stationary under the fourth-order laws") {
  auto g = circle(1, 128);
  SolverConfig cfg;
  cfg.t_end = 0.01;
  cfg.dt_max = 1e-5;
  cfg.cfl = 10;
  cfg.resample_every = 0;
  cfg.snapshot_stride = 1000000;
  auto traj = simulate(g, flow_preset("sdf"), cfg);
  REQUIRE(traj.termination == Termination::ReachedEnd);
  CHECK(std::abs(mean_radius(traj.snapshots.back()) - 1.0) < 1e-9);
}

TEST_CASE("the translating profile moves vertically at unit speed") {
  ReferenceCurveSpec spec;
  spec.kind = ReferenceCurveSpec::Kind::GrimReaper;
  spec.S = 6;
  spec.h = 0.01;
  auto g0 = build_reference(spec);
  SolverConfig cfg;
  cfg.t_end = 0.5;
  cfg.dt_max = 5e-4;
  cfg.cfl = 10;
  cfg.resample_every = 10;
  cfg.snapshot_stride = 1000000;
  auto traj = simulate(g0, flow_preset("csf"), cfg);
  REQUIRE(traj.termination == Termination::ReachedEnd);
  const auto& gT = traj.snapshots.back();
  // compare the central window against the initial curve shifted by (0, t)
  DiscreteCurve shifted = g0;
  for (std::size_t i = 0; i < shifted.total_nodes(); ++i) shifted.pts[i * 2 + 1] += 0.5;
  Real worst = 0;
  auto s = cumulative_arclength(gT);
  for (std::size_t i = gT.interior_begin(); i < gT.interior_end(); ++i) {
    if (std::abs(s[i]) > 4) continue;
    worst = std::max(worst, dist_to_polyline(shifted, gT.pts[i * 2], gT.pts[i * 2 + 1]));
  }
  CHECK(worst < 1e-2);
}

TEST_CASE("the stationary loop stays put under the clamped elastic flow") {
  ReferenceCurveSpec spec;
  spec.kind = ReferenceCurveSpec::Kind::BorderlineElastica;
  spec.S = 14;
  spec.h = 0.01;
  auto g0 = build_reference(spec);
  SolverConfig cfg;
  cfg.t_end = 0.05;
  cfg.dt_max = 2e-4;
  cfg.cfl = 10;
  cfg.resample_every = 0;
  cfg.snapshot_stride = 1000000;
  auto traj = simulate(g0, flow_preset("elastic", 1), cfg);
  REQUIRE(traj.termination == Termination::ReachedEnd);
  const auto& gT = traj.snapshots.back();
  Real worst = 0;
  for (std::size_t k = 0; k < gT.pts.size(); ++k)
    worst = std::max(worst, std::abs(gT.pts[k] - g0.pts[k]));
  CHECK(worst < 2e-4);
}

TEST_CASE("the tangential term only reparametrizes the image") {
  ReferenceCurveSpec spec;
  spec.kind = ReferenceCurveSpec::Kind::GraphGaussian;
  spec.S = 6;
  spec.h = 0.02;
  spec.amplitude = 0.5;
  auto g0 = build_reference(spec);
  SolverConfig cfg;
  cfg.t_end = 0.004;
  cfg.dt_max = 2e-5;
  cfg.cfl = 10;
  cfg.resample_every = 0;
  cfg.snapshot_stride = 1000000;
  auto with_t = simulate(g0, flow_preset("chen"), cfg);
  FlowParams purely_normal{1, 0, 1, 0};
  auto without_t = simulate(g0, purely_normal, cfg);
  REQUIRE(with_t.termination == Termination::ReachedEnd);
  REQUIRE(without_t.termination == Termination::ReachedEnd);
  CHECK(hausdorff(with_t.snapshots.back(), without_t.snapshots.back()) < 10 * g0.h);
}

TEST_CASE("grid degeneration raises a step rejection") {
  auto g = circle(1, 64);
  auto f = compute_fields(g);
  auto v = velocity(g, f, flow_preset("csf"));
  // an absurd step shrinks every segment far below the rejection threshold
  CHECK_THROWS_AS(step(g, f, v, flow_preset("csf"), 5.0, 0.5), StepRejected);
}

TEST_CASE("a shrinking circle ends in detected blow-up with a time estimate") {
  auto g = circle(0.2, 128);
  SolverConfig cfg;
  cfg.t_end = 1.0;  // vanishing time is 0.02, well before the horizon
  cfg.dt_max = 1e-5;
  cfg.cfl = 0.1;
  cfg.kappa_max = 60;
  cfg.resample_every = 10;
  cfg.snapshot_stride = 10;
  auto traj = simulate(g, flow_preset("csf"), cfg);
  REQUIRE(traj.termination == Termination::Blowup);
  Real T = oracle::circle_csf_vanish_time(0.2);
  CHECK(traj.t_final < T);
  CHECK(traj.blowup_estimate > traj.t_final);
  CHECK(std::abs(traj.blowup_estimate - T) < 0.02 * T);
}

TEST_CASE("simulation results are bit-for-bit deterministic") {
  ReferenceCurveSpec spec;
  spec.kind = ReferenceCurveSpec::Kind::GraphGaussian;
  spec.S = 5;
  spec.h = 0.05;
  spec.amplitude = 0.4;
  auto g0 = build_reference(spec);
  SolverConfig cfg;
  cfg.t_end = 0.01;
  cfg.dt_max = 1e-4;
  cfg.resample_every = 7;
  cfg.snapshot_stride = 11;
  auto a = simulate(g0, flow_preset("elastic", 1), cfg);
  auto b = simulate(g0, flow_preset("elastic", 1), cfg);
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (std::size_t s = 0; s < a.snapshots.size(); ++s)
    for (std::size_t k = 0; k < a.snapshots[s].pts.size(); ++k)
      CHECK(a.snapshots[s].pts[k] == b.snapshots[s].pts[k]);
}
