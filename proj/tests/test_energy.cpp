#include <catch2/catch_amalgamated.hpp>

#include "curveflow/energy.hpp"
#include "curveflow/reference.hpp"
#include "oracles.hpp"

using namespace curveflow;

namespace {

ReferenceCurveSpec loop_spec(Real S, Real h) {
  ReferenceCurveSpec spec;
  spec.kind = ReferenceCurveSpec::Kind::BorderlineElastica;
  spec.S = S;
  spec.h = h;
  return spec;
}

// Normal field from a scalar profile times the leftward normal (planar):
// rotate the tangent by +pi/2 and scale; vanishes where profile vanishes.
std::vector<Real> planar_normal_field(const DiscreteCurve& g, const CurveFields& f,
                                      const std::function<Real(Real)>& profile) {
  std::vector<Real> phi(g.total_nodes() * static_cast<std::size_t>(g.dim), 0.0);
  for (std::size_t i = 0; i < g.total_nodes(); ++i) {
    Real v = profile(g.param(i));
    phi[i * g.dim + 0] = -v * f.t[i * g.dim + 1];
    phi[i * g.dim + 1] = v * f.t[i * g.dim + 0];
  }
  return phi;
}

Real smooth_bump(Real s, Real a, Real b) {
  if (s <= a || s >= b) return 0;
  Real u = (s - a) / (b - a);
  return std::exp(-1 / (u * (1 - u))) * std::exp(4.0);
}

}  // namespace

TEST_CASE("energies of the single-loop profile match the closed forms") {
  auto g = build_reference(loop_spec(20, 0.01));
  auto f = compute_fields(g);
  Real B = bending_energy(g, f);
  Real D = direction_energy(g, f);
  CHECK(std::abs(B - oracle::loop_energy_bending()) < 5e-4);
  CHECK(std::abs(D - oracle::loop_energy_direction()) < 3e-4);
  CHECK(std::abs(adapted_energy(g, f, 1, 1) - oracle::loop_energy_total()) < 8e-4);
  CHECK(std::abs(adapted_energy(g, f, 2, 3) - (2 * oracle::loop_energy_bending() +
                                               3 * oracle::loop_energy_direction())) < 2e-3);
  CHECK_THROWS_AS(adapted_energy(g, f, -1, 0), InvalidInput);
}

TEST_CASE("energies of a circle match the closed forms") {
  ReferenceCurveSpec spec;
  spec.kind = ReferenceCurveSpec::Kind::Circle;
  spec.radius = 2;
  spec.nodes = 256;
  auto g = build_reference(spec);
  auto f = compute_fields(g);

  Real B = bending_energy(g, f);
  // half of (1/r)^2 times the length
  CHECK(std::abs(B - kPi / 2) < 5e-4);

  std::vector<Real> ones(g.total_nodes(), 1.0);
  Real L = integrate(g, ones, f.w);
  // on a closed curve the tangent component integrates to zero exactly,
  // so the direction energy equals the quadrature length to roundoff
  CHECK(std::abs(direction_energy(g, f) - L) < 1e-12 * L);
}

TEST_CASE("localized energies integrate the density against the weight") {
  auto g = build_reference(loop_spec(12, 0.01));
  auto f = compute_fields(g);
  auto profile = [](Real s) {
    auto step = [](Real u) {
      u = std::clamp(u, Real(0), Real(1));
      return u * u * (3 - 2 * u);
    };
    return std::min(step((s + 2.5) / 1.5), step((3.5 - s) / 1.5));
  };
  std::vector<Real> eta(g.total_nodes());
  for (std::size_t i = 0; i < g.total_nodes(); ++i) eta[i] = profile(g.param(i));

  Real Bloc = localized_energy(g, f, eta, LocalizedKind::Bending);
  Real Dloc = localized_energy(g, f, eta, LocalizedKind::Direction);
  Real Bref = oracle::simpson(
      [&](Real s) { return 0.5 * sqr(oracle::loop_curvature(s)) * profile(s); }, -2.5, 3.5);
  Real Dref = oracle::simpson(
      [&](Real s) { return (1 - std::cos(oracle::loop_angle(s))) * profile(s); }, -2.5,
      3.5);
  CHECK(std::abs(Bloc - Bref) < 1e-3);
  CHECK(std::abs(Dloc - Dref) < 1e-3);

  // weight identically one reduces to the plain energies
  std::vector<Real> ones(g.total_nodes(), 1.0);
  CHECK(std::abs(localized_energy(g, f, ones, LocalizedKind::Bending) -
                 bending_energy(g, f)) < 1e-12);
}

TEST_CASE("first variation vanishes on the stationary profile") {
  auto g = build_reference(loop_spec(14, 0.01));
  auto f = compute_fields(g);
  for (Real center : {-3.0, 0.0, 2.0}) {
    auto phi = planar_normal_field(
        g, f, [&](Real s) { return smooth_bump(s, center - 2, center + 2); });
    Real dE = first_variation(g, f, 1, 1, phi);
    CHECK(std::abs(dE) < 1e-2);
  }
}

TEST_CASE("first variation matches finite differences of the energy") {
  auto run_defect = [&](Real h) {
    ReferenceCurveSpec spec;
    spec.kind = ReferenceCurveSpec::Kind::GraphGaussian;
    spec.S = 6;
    spec.h = h;
    spec.amplitude = 0.5;
    spec.width = 1.2;
    auto g = build_reference(spec);
    auto f = compute_fields(g);
    auto phi = planar_normal_field(g, f, [](Real s) { return smooth_bump(s, -4, 3); });
    const Real sigma = 1, lambda = 0.7;
    Real formula = first_variation(g, f, sigma, lambda, phi);
    const Real eps = 1e-5;
    auto shifted = [&](Real sgn) {
      DiscreteCurve gs = g;
      for (std::size_t k = 0; k < gs.pts.size(); ++k) gs.pts[k] += sgn * eps * phi[k];
      auto fs = compute_fields(gs);
      return adapted_energy(gs, fs, sigma, lambda);
    };
    Real fd = (shifted(1) - shifted(-1)) / (2 * eps);
    return std::abs(fd - formula);
  };
  Real d1 = run_defect(0.02);
  Real d2 = run_defect(0.01);
  CHECK(d2 < 1e-4);
  CHECK(d1 / d2 > 3.0);  // second-order consistency
}

TEST_CASE("first variation on a circle reproduces the radius derivative") {
  ReferenceCurveSpec spec;
  spec.kind = ReferenceCurveSpec::Kind::Circle;
  spec.radius = 2;
  spec.nodes = 512;
  auto g = build_reference(spec);
  auto f = compute_fields(g);
  // uniform inward normal field: phi = -e_r
  std::vector<Real> phi(g.total_nodes() * 2);
  for (std::size_t i = 0; i < g.total_nodes(); ++i) {
    std::span<const Real> p(g.pts.data() + i * 2, 2);
    Real r = norm(p);
    phi[i * 2 + 0] = -p[0] / r;
    phi[i * 2 + 1] = -p[1] / r;
  }
  // bending energy of a circle is pi / r, derivative pi / r^2 under shrinking
  Real expect = kPi / 4;
  CHECK(std::abs(first_variation(g, f, 1, 0, phi) - expect) < 1e-3 * expect);
}

TEST_CASE("first variation rejects invalid variation fields") {
  auto g = build_reference(loop_spec(10, 0.02));
  auto f = compute_fields(g);

  SECTION("tangential component") {
    std::vector<Real> phi(g.total_nodes() * 2, 0.0);
    std::size_t mid = g.total_nodes() / 2;
    phi[mid * 2 + 0] = f.t[mid * 2 + 0];
    phi[mid * 2 + 1] = f.t[mid * 2 + 1];
    CHECK_THROWS_AS(first_variation(g, f, 1, 0, phi), InvalidInput);
  }

  SECTION("support touching the clamped layers") {
    auto phi = planar_normal_field(g, f, [](Real) { return 1.0; });
    CHECK_THROWS_AS(first_variation(g, f, 1, 0, phi), InvalidInput);
  }
}

TEST_CASE("graphical report bounds the direction energy by the slope") {
  ReferenceCurveSpec spec;
  spec.kind = ReferenceCurveSpec::Kind::GraphGaussian;
  spec.S = 10;
  spec.h = 0.02;
  spec.amplitude = 0.3;
  auto g = build_reference(spec);
  auto f = compute_fields(g);
  auto rep = graphical_end_report(g, f);
  CHECK(rep.graphical);
  CHECK(rep.min_tx > 0.9);
  CHECK(rep.direction_value > 0);
  CHECK(rep.bound_holds);
  CHECK(rep.direction_value < rep.slope_l2_half);

  // the bound is quantitatively tight for shallow slopes: compare to the
  // closed-form slope integral of the gaussian profile
  Real slope_half = oracle::simpson(
      [](Real x) { return 0.5 * sqr(-0.6 * x * std::exp(-x * x)); }, -10, 10);
  CHECK(std::abs(rep.slope_l2_half - slope_half) < 1e-4);

  auto loop = build_reference(loop_spec(10, 0.02));
  auto floop = compute_fields(loop);
  auto rep2 = graphical_end_report(loop, floop);
  CHECK_FALSE(rep2.graphical);
}
