#pragma once

#include <functional>

#include "curveflow/curve.hpp"

namespace curveflow {

// Gudermannian function, gd(u) = 2 atan(e^u) - pi/2.
inline Real gudermannian(Real u) { return 2 * std::atan(std::exp(u)) - kPi / 2; }

// Number of ghost layers a clamped curve needs so that every differential
// operator used by the flows (up to two covariant derivatives of curvature)
// sees centered data at all interior nodes.
constexpr int kGhostLayers = 4;

struct ReferenceCurveSpec {
  enum class Kind {
    Line,              // straight segment along `direction`
    Circle,            // closed circle of radius `radius`, `nodes` samples
    BorderlineElastica,// (s - 2 tanh(s + s_offset), 2 sech(s + s_offset))
    GrimReaper,        // translating solution, scale * (gd(u), log cosh(u))
    Loop,              // single loop, tangent angle 4 atan(e^{s/scale})
    TwoLoop,           // tangent angle 4 atan(e^{s+sep}) + 4 atan(e^{s-sep})
    GraphPowerEnd,     // graph of (1 + x^2)^{alpha/2}
    GraphPowerSinLog,  // graph of (1 + x^2)^{alpha/2} sin(log(1 + x^2) / 2)
    GraphGaussian,     // graph of amplitude * exp(-(x / width)^2)
  };

  Kind kind = Kind::Line;
  int dim = 2;
  Real S = 10;        // open curves cover parameter range [-S, S]
  Real h = 0.01;
  Real radius = 1;    // Circle
  int nodes = 256;    // Circle
  Real s_offset = 0;  // BorderlineElastica
  Real scale = 1;     // GrimReaper, Loop
  Real separation = 2.5;  // TwoLoop
  Real alpha = 0.3;   // graph power profiles
  Real amplitude = 0.3;   // GraphGaussian
  Real width = 1;     // GraphGaussian
  std::vector<Real> direction;  // Line; defaults to the first axis
};

namespace detail {

inline DiscreteCurve make_open_shell(const ReferenceCurveSpec& spec, std::size_t half) {
  DiscreteCurve g;
  g.dim = spec.dim;
  g.h = spec.h;
  g.ends = EndCondition::Clamped;
  g.ghost = kGhostLayers;
  g.s0 = -static_cast<Real>(half) * spec.h;
  std::size_t total = 2 * (half + kGhostLayers) + 1;
  g.pts.assign(total * static_cast<std::size_t>(spec.dim), 0.0);
  return g;
}

// Builds an open planar curve from an explicit parametrization of the first
// two coordinates; remaining coordinates stay zero.
inline DiscreteCurve from_plane_map(const ReferenceCurveSpec& spec,
                                    const std::function<void(Real, Real&, Real&)>& map) {
  require(spec.S > 0 && spec.h > 0, "curve extent and spacing must be positive");
  auto half = static_cast<std::size_t>(std::llround(spec.S / spec.h));
  require(half >= 4, "curve must span at least a few nodes per side");
  DiscreteCurve g = make_open_shell(spec, half);
  const std::size_t total = g.total_nodes();
  const auto offset = static_cast<std::ptrdiff_t>(half) + kGhostLayers;
  for (std::size_t i = 0; i < total; ++i) {
    Real u = (static_cast<std::ptrdiff_t>(i) - offset) * spec.h;
    Real x = 0, y = 0;
    map(u, x, y);
    g.pts[i * g.dim + 0] = x;
    g.pts[i * g.dim + 1] = y;
  }
  g.validate();
  return g;
}

// Builds an open planar curve from a tangent-angle profile by integrating
// (cos theta, sin theta) outward from u = 0 with per-interval Simpson rule,
// so the result is parametrized by arclength up to O(h^4).
inline DiscreteCurve from_angle_profile(const ReferenceCurveSpec& spec,
                                        const std::function<Real(Real)>& theta) {
  require(spec.S > 0 && spec.h > 0, "curve extent and spacing must be positive");
  auto half = static_cast<std::size_t>(std::llround(spec.S / spec.h));
  require(half >= 4, "curve must span at least a few nodes per side");
  DiscreteCurve g = make_open_shell(spec, half);
  const auto offset = static_cast<std::ptrdiff_t>(half) + kGhostLayers;
  auto set = [&](std::ptrdiff_t j, Real x, Real y) {
    std::size_t i = static_cast<std::size_t>(j + offset);
    g.pts[i * g.dim + 0] = x;
    g.pts[i * g.dim + 1] = y;
  };
  auto advance = [&](Real u0, Real u1, Real& x, Real& y) {
    Real tm = theta((u0 + u1) / 2);
    Real t0 = theta(u0), t1 = theta(u1);
    Real d = (u1 - u0) / 6;
    x += d * (std::cos(t0) + 4 * std::cos(tm) + std::cos(t1));
    y += d * (std::sin(t0) + 4 * std::sin(tm) + std::sin(t1));
  };
  set(0, 0, 0);
  Real x = 0, y = 0;
  for (std::ptrdiff_t j = 1; j <= offset; ++j) {
    advance((j - 1) * spec.h, j * spec.h, x, y);
    set(j, x, y);
  }
  x = 0;
  y = 0;
  for (std::ptrdiff_t j = -1; j >= -offset; --j) {
    advance((j + 1) * spec.h, j * spec.h, x, y);
    set(j, x, y);
  }
  g.validate();
  return g;
}

}  // namespace detail

inline DiscreteCurve build_reference(const ReferenceCurveSpec& spec) {
  using Kind = ReferenceCurveSpec::Kind;
  require(spec.dim >= 2, "curve dimension must be at least 2");
  switch (spec.kind) {
    case Kind::Line: {
      std::vector<Real> dir = spec.direction;
      if (dir.empty()) {
        dir.assign(static_cast<std::size_t>(spec.dim), 0.0);
        dir[0] = 1;
      }
      require(static_cast<int>(dir.size()) == spec.dim,
              "line direction dimension mismatch");
      Real len = norm(dir);
      require(len > 0, "line direction must be nonzero");
      for (auto& c : dir) c /= len;
      require(spec.S > 0 && spec.h > 0, "curve extent and spacing must be positive");
      auto half = static_cast<std::size_t>(std::llround(spec.S / spec.h));
      require(half >= 4, "curve must span at least a few nodes per side");
      DiscreteCurve g = detail::make_open_shell(spec, half);
      const auto offset = static_cast<std::ptrdiff_t>(half) + kGhostLayers;
      for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        Real u = (static_cast<std::ptrdiff_t>(i) - offset) * spec.h;
        for (int c = 0; c < spec.dim; ++c) g.pts[i * g.dim + c] = u * dir[c];
      }
      g.validate();
      return g;
    }
    case Kind::Circle: {
      require(spec.radius > 0, "circle radius must be positive");
      require(spec.nodes >= 8, "circle needs at least 8 nodes");
      DiscreteCurve g;
      g.dim = spec.dim;
      g.ends = EndCondition::Periodic;
      g.ghost = 0;
      g.h = 2 * kPi * spec.radius / spec.nodes;
      g.s0 = 0;
      g.pts.assign(static_cast<std::size_t>(spec.nodes) * spec.dim, 0.0);
      for (int i = 0; i < spec.nodes; ++i) {
        Real a = 2 * kPi * i / spec.nodes;
        g.pts[static_cast<std::size_t>(i) * g.dim + 0] = spec.radius * std::cos(a);
        g.pts[static_cast<std::size_t>(i) * g.dim + 1] = spec.radius * std::sin(a);
      }
      g.validate();
      return g;
    }
    case Kind::BorderlineElastica:
      return detail::from_plane_map(spec, [&](Real s, Real& x, Real& y) {
        x = s - 2 * std::tanh(s + spec.s_offset);
        y = 2 / std::cosh(s + spec.s_offset);
      });
    case Kind::GrimReaper: {
      require(spec.scale > 0, "grim reaper scale must be positive");
      Real a = spec.scale;
      return detail::from_plane_map(spec, [&](Real s, Real& x, Real& y) {
        x = a * gudermannian(s / a);
        y = a * std::log(std::cosh(s / a));
      });
    }
    case Kind::Loop: {
      require(spec.scale > 0, "loop scale must be positive");
      Real rho = spec.scale;
      return detail::from_plane_map(spec, [&](Real s, Real& x, Real& y) {
        x = s - 2 * rho * std::tanh(s / rho);
        y = 2 * rho / std::cosh(s / rho);
      });
    }
    case Kind::TwoLoop: {
      Real d = spec.separation;
      require(d > 0, "two-loop separation must be positive");
      return detail::from_angle_profile(spec, [&](Real s) {
        return 4 * std::atan(std::exp(s + d)) + 4 * std::atan(std::exp(s - d));
      });
    }
    case Kind::GraphPowerEnd:
      return detail::from_plane_map(spec, [&](Real x, Real& px, Real& py) {
        px = x;
        py = std::pow(1 + x * x, spec.alpha / 2);
      });
    case Kind::GraphPowerSinLog:
      return detail::from_plane_map(spec, [&](Real x, Real& px, Real& py) {
        px = x;
        py = std::pow(1 + x * x, spec.alpha / 2) * std::sin(std::log(1 + x * x) / 2);
      });
    case Kind::GraphGaussian:
      require(spec.width > 0, "gaussian width must be positive");
      return detail::from_plane_map(spec, [&](Real x, Real& px, Real& py) {
        px = x;
        py = spec.amplitude * std::exp(-sqr(x / spec.width));
      });
  }
  throw InvalidInput("unknown reference curve kind");
}

}  // namespace curveflow
