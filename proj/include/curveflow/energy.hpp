#pragma once

#include "curveflow/curve.hpp"

namespace curveflow {

// Geometry bundle shared by the energy and flow computations.
struct CurveFields {
  std::vector<Real> w;      // metric factors
  std::vector<Real> t;      // unit tangents
  std::vector<Real> kappa;  // curvature vectors
};

inline CurveFields compute_fields(const DiscreteCurve& g) {
  CurveFields f;
  f.w = metric(g);
  f.t = tangent(g);
  f.kappa = curvature_vector(g, f.w, f.t);
  return f;
}

namespace detail {

// Discrete null-Lagrangian identity: with full node weights, the quadrature of
// <T, e1> w h telescopes exactly to the midpoint displacement of the curve.
// A violation indicates corrupted fields, so it is checked on every call.
inline void check_direction_telescoping(const DiscreteCurve& g, const CurveFields& f) {
  const std::size_t n = g.total_nodes();
  const std::size_t b = g.interior_begin(), e = g.interior_end();
  Real tele = 0;
  for (std::size_t i = b; i < e; ++i) tele += f.t[i * g.dim] * f.w[i] * g.h;
  Real disp = 0, scale = 1;
  if (g.ends == EndCondition::Periodic) {
    disp = 0;
  } else {
    if (g.ghost < 1) return;  // one-sided end stencils do not telescope
    disp = (g.pts[(e - 1) * g.dim] + g.pts[e * g.dim] - g.pts[b * g.dim] -
            g.pts[(b - 1) * g.dim]) /
           2;
  }
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(g.pts[i * g.dim]));
  if (std::abs(tele - disp) > 1e-10 * scale * static_cast<Real>(n))
    throw SolverError("direction energy: telescoping identity violated");
}

}  // namespace detail

// Integral of 1 - <T, e1> against arclength. Nonnegative; zero only for a
// straight segment pointing along the first axis.
inline Real direction_energy(const DiscreteCurve& g, const CurveFields& f) {
  detail::check_direction_telescoping(g, f);
  const std::size_t n = g.total_nodes();
  std::vector<Real> density(n);
  for (std::size_t i = 0; i < n; ++i) density[i] = 1 - f.t[i * g.dim];
  return integrate(g, density, f.w);
}

// Half the integral of |kappa|^2 against arclength.
inline Real bending_energy(const DiscreteCurve& g, const CurveFields& f) {
  const std::size_t n = g.total_nodes();
  std::vector<Real> density(n);
  for (std::size_t i = 0; i < n; ++i) {
    Real ksq = 0;
    for (int c = 0; c < g.dim; ++c) ksq += sqr(f.kappa[i * g.dim + c]);
    density[i] = ksq / 2;
  }
  return integrate(g, density, f.w);
}

// sigma * bending + lambda * direction, the Lyapunov functional of the flows.
inline Real adapted_energy(const DiscreteCurve& g, const CurveFields& f, Real sigma,
                           Real lambda) {
  require(sigma >= 0 && lambda >= 0, "adapted energy weights must be nonnegative");
  Real acc = 0;
  if (sigma != 0) acc += sigma * bending_energy(g, f);
  if (lambda != 0) acc += lambda * direction_energy(g, f);
  return acc;
}

enum class LocalizedKind { Direction, Bending };

// Localized energy against a node-sampled weight eta.
inline Real localized_energy(const DiscreteCurve& g, const CurveFields& f,
                             std::span<const Real> eta, LocalizedKind kind) {
  const std::size_t n = g.total_nodes();
  require(eta.size() == n, "localized energy: weight size mismatch");
  std::vector<Real> density(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (kind == LocalizedKind::Direction) {
      density[i] = 1 - f.t[i * g.dim];
    } else {
      Real ksq = 0;
      for (int c = 0; c < g.dim; ++c) ksq += sqr(f.kappa[i * g.dim + c]);
      density[i] = ksq / 2;
    }
  }
  return integrate(g, density, f.w, eta);
}

// Nodes within this distance of a clamped boundary have stencils that read
// frozen data; variation fields must vanish there.
inline constexpr int kGhostReach = 4;

// Directional derivative of the adapted energy along a normal field phi:
//   integral of < sigma * (D_s^2 kappa + |kappa|^2 kappa / 2) - lambda * kappa, phi >.
// phi must be normal to the curve and, on clamped curves, vanish on the nodes
// whose stencils touch the frozen boundary layers.
inline Real first_variation(const DiscreteCurve& g, const CurveFields& f, Real sigma,
                            Real lambda, std::span<const Real> phi) {
  const std::size_t n = g.total_nodes();
  require(phi.size() == n * static_cast<std::size_t>(g.dim),
          "first variation: field size mismatch");
  const std::size_t b = g.interior_begin(), e = g.interior_end();
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const Real> pi(phi.data() + i * g.dim, static_cast<std::size_t>(g.dim));
    std::span<const Real> ti(f.t.data() + i * g.dim, static_cast<std::size_t>(g.dim));
    require(std::abs(dot(pi, ti)) <= 1e-8 * (1 + norm(pi)),
            "first variation: field must be normal to the curve");
    if (g.ends == EndCondition::Clamped) {
      bool near_end = i < b + static_cast<std::size_t>(kGhostReach) ||
                      i + static_cast<std::size_t>(kGhostReach) >= e;
      if (near_end && norm(pi) > 0)
        throw InvalidInput("first variation: field must vanish near clamped ends");
    }
  }
  auto k2 = covariant_derivative(g, f.kappa, f.w, f.t, 2);
  std::vector<Real> density(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Real ksq = 0;
    for (int c = 0; c < g.dim; ++c) ksq += sqr(f.kappa[i * g.dim + c]);
    Real acc = 0;
    for (int c = 0; c < g.dim; ++c) {
      Real grad = sigma * (k2[i * g.dim + c] + ksq / 2 * f.kappa[i * g.dim + c]) -
                  lambda * f.kappa[i * g.dim + c];
      acc += grad * phi[i * g.dim + c];
    }
    density[i] = acc;
  }
  return integrate(g, density, f.w);
}

struct GraphicalEndReport {
  bool graphical = false;     // min <T, e1> > 0 over the interior
  Real min_tx = 0;            // worst tangent alignment
  Real direction_value = 0;   // integral of (1 - <T,e1>) ds
  Real slope_l2_half = 0;     // half the squared L2 norm of the graph slope, dx measure
  bool bound_holds = false;   // direction_value <= slope_l2_half
};

// Treats the curve as a graph over the first axis and reports the direction
// energy against the slope-based upper bound (valid whenever the curve is
// graphical).
inline GraphicalEndReport graphical_end_report(const DiscreteCurve& g,
                                               const CurveFields& f) {
  GraphicalEndReport rep;
  const std::size_t n = g.total_nodes();
  const std::size_t b = g.interior_begin(), e = g.interior_end();
  rep.min_tx = 1;
  for (std::size_t i = b; i < e; ++i) rep.min_tx = std::min(rep.min_tx, f.t[i * g.dim]);
  rep.graphical = rep.min_tx > 0;
  rep.direction_value = direction_energy(g, f);
  if (!rep.graphical) return rep;
  std::vector<Real> density(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Real tx = f.t[i * g.dim];
    if (tx <= 0) continue;
    Real slope_sq = (1 - tx * tx) / (tx * tx);
    // dx = tx ds converts the quadrature to the graph coordinate
    density[i] = slope_sq / 2 * tx;
  }
  rep.slope_l2_half = integrate(g, density, f.w);
  rep.bound_holds = rep.direction_value <= rep.slope_l2_half * (1 + 1e-12) + 1e-15;
  return rep;
}

}  // namespace curveflow
