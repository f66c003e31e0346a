#pragma once

#include <algorithm>
#include <cstring>

#include "curveflow/common.hpp"

namespace curveflow {

enum class EndCondition { Clamped, Periodic };

// Polyline on a uniform parameter grid. Storage is row-major and "extended":
// for clamped curves it carries `ghost` frozen layers on each side so that
// centered stencils remain valid up to the first/last interior node. Periodic
// curves carry no ghost layers; indices wrap. Node i has parameter
// s0 + (i - ghost) * h, so the first interior node sits at s0.
//
// Fields (scalar or vector quantities sampled on the nodes) are stored as
// plain std::vector<Real> aligned with the extended node range.
struct DiscreteCurve {
  int dim = 2;
  Real h = 0;
  Real s0 = 0;
  EndCondition ends = EndCondition::Clamped;
  int ghost = 0;
  std::vector<Real> pts;

  std::size_t total_nodes() const { return pts.size() / static_cast<std::size_t>(dim); }
  std::size_t interior_count() const {
    return total_nodes() - 2 * static_cast<std::size_t>(ghost);
  }
  std::size_t interior_begin() const { return static_cast<std::size_t>(ghost); }
  std::size_t interior_end() const { return total_nodes() - static_cast<std::size_t>(ghost); }

  Real param(std::size_t i) const {
    return s0 + (static_cast<Real>(i) - static_cast<Real>(ghost)) * h;
  }

  std::span<Real> node(std::size_t i) {
    return {pts.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::span<const Real> node(std::size_t i) const {
    return {pts.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }

  void validate() const {
    require(dim >= 2, "curve dimension must be at least 2");
    require(h > 0, "grid spacing must be positive");
    require(pts.size() % static_cast<std::size_t>(dim) == 0,
            "point buffer size must be a multiple of the dimension");
    if (ends == EndCondition::Periodic) {
      require(ghost == 0, "periodic curves carry no ghost layers");
      require(total_nodes() >= 5, "periodic curve needs at least 5 nodes");
    } else {
      require(interior_count() >= 5, "clamped curve needs at least 5 interior nodes");
    }
  }
};

namespace detail {

inline std::size_t wrap_index(std::ptrdiff_t i, std::size_t n) {
  std::ptrdiff_t m = static_cast<std::ptrdiff_t>(n);
  std::ptrdiff_t r = i % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

}  // namespace detail

// First derivative with respect to the grid parameter, second order: centered
// in the interior of the stored array, one-sided at the array ends (clamped
// curves with ghost layers never evaluate the one-sided branch on interior
// nodes), wrapping for periodic curves. `comps` is the number of components
// per node in `field`.
inline std::vector<Real> dx_field(const DiscreteCurve& g, std::span<const Real> field,
                                  int comps) {
  const std::size_t n = g.total_nodes();
  require(field.size() == n * static_cast<std::size_t>(comps),
          "field size does not match the curve's node count");
  std::vector<Real> out(field.size());
  const Real inv2h = 1 / (2 * g.h);
  auto at = [&](std::ptrdiff_t i, int c) -> Real {
    std::size_t j = g.ends == EndCondition::Periodic
                        ? detail::wrap_index(i, n)
                        : static_cast<std::size_t>(i);
    return field[j * static_cast<std::size_t>(comps) + static_cast<std::size_t>(c)];
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < comps; ++c) {
      Real v;
      if (g.ends == EndCondition::Periodic) {
        v = (at(static_cast<std::ptrdiff_t>(i) + 1, c) -
             at(static_cast<std::ptrdiff_t>(i) - 1, c)) *
            inv2h;
      } else if (i == 0) {
        v = (-3 * at(0, c) + 4 * at(1, c) - at(2, c)) * inv2h;
      } else if (i + 1 == n) {
        auto m = static_cast<std::ptrdiff_t>(n) - 1;
        v = (3 * at(m, c) - 4 * at(m - 1, c) + at(m - 2, c)) * inv2h;
      } else {
        v = (at(static_cast<std::ptrdiff_t>(i) + 1, c) -
             at(static_cast<std::ptrdiff_t>(i) - 1, c)) *
            inv2h;
      }
      out[i * static_cast<std::size_t>(comps) + static_cast<std::size_t>(c)] = v;
    }
  }
  return out;
}

// Metric factor w_i = |d\gamma/dx|_i. Positive on a valid embedded polyline.
inline std::vector<Real> metric(const DiscreteCurve& g) {
  auto dgamma = dx_field(g, g.pts, g.dim);
  const std::size_t n = g.total_nodes();
  std::vector<Real> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    Real v = norm(std::span<const Real>(dgamma.data() + i * g.dim, g.dim));
    if (!(v > 0)) throw InvalidInput("degenerate curve: vanishing metric factor");
    w[i] = v;
  }
  return w;
}

// Unit tangent field T_i.
inline std::vector<Real> tangent(const DiscreteCurve& g) {
  auto t = dx_field(g, g.pts, g.dim);
  const std::size_t n = g.total_nodes();
  for (std::size_t i = 0; i < n; ++i) {
    std::span<Real> ti(t.data() + i * g.dim, g.dim);
    Real v = norm(ti);
    if (!(v > 0)) throw InvalidInput("degenerate curve: vanishing tangent");
    for (auto& c : ti) c /= v;
  }
  return t;
}

// Arclength derivative of a field: (1/w) d/dx, no projection.
inline std::vector<Real> d_ds(const DiscreteCurve& g, std::span<const Real> field,
                              std::span<const Real> w, int comps) {
  auto out = dx_field(g, field, comps);
  const std::size_t n = g.total_nodes();
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < comps; ++c) out[i * comps + c] /= w[i];
  return out;
}

// Removes the tangential component of a vector field node-wise.
inline void project_normal(const DiscreteCurve& g, std::span<const Real> t,
                           std::span<Real> field) {
  const std::size_t n = g.total_nodes();
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const Real> ti(t.data() + i * g.dim, g.dim);
    std::span<Real> fi(field.data() + i * g.dim, g.dim);
    Real c = dot(fi, ti);
    for (int k = 0; k < g.dim; ++k) fi[k] -= c * ti[k];
  }
}

// Curvature vector: projection of (1/w) dT/dx onto the normal space. On a
// uniformly sampled circle of radius r this evaluates to |kappa| = 1/r exactly
// (the chord/arc factors cancel between the metric and the tangent stencil).
inline std::vector<Real> curvature_vector(const DiscreteCurve& g,
                                          std::span<const Real> w,
                                          std::span<const Real> t) {
  auto kappa = d_ds(g, t, w, g.dim);
  project_normal(g, t, kappa);
  return kappa;
}

inline std::vector<Real> curvature_vector(const DiscreteCurve& g) {
  auto w = metric(g);
  auto t = tangent(g);
  return curvature_vector(g, w, t);
}

// m-fold normal covariant derivative along the curve: each application takes
// the arclength derivative and removes the tangential part.
inline std::vector<Real> covariant_derivative(const DiscreteCurve& g,
                                              std::span<const Real> field,
                                              std::span<const Real> w,
                                              std::span<const Real> t, int m) {
  require(m >= 0, "derivative order must be nonnegative");
  std::vector<Real> cur(field.begin(), field.end());
  for (int j = 0; j < m; ++j) {
    cur = d_ds(g, cur, w, g.dim);
    project_normal(g, t, cur);
  }
  return cur;
}

// Trapezoidal line integral of a scalar field against the arclength element,
// optionally weighted: sum f_i zeta_i w_i h. Clamped curves integrate over the
// interior range with half weights at the two interior ends; periodic curves
// sum the full cycle.
inline Real integrate(const DiscreteCurve& g, std::span<const Real> f,
                      std::span<const Real> w,
                      std::span<const Real> zeta = {}) {
  const std::size_t n = g.total_nodes();
  require(f.size() == n, "scalar field size does not match the curve");
  require(w.size() == n, "metric size does not match the curve");
  if (!zeta.empty())
    require(zeta.size() == n, "weight size does not match the curve");
  Real acc = 0;
  if (g.ends == EndCondition::Periodic) {
    for (std::size_t i = 0; i < n; ++i) {
      Real v = f[i] * w[i];
      if (!zeta.empty()) v *= zeta[i];
      acc += v;
    }
    return acc * g.h;
  }
  const std::size_t b = g.interior_begin();
  const std::size_t e = g.interior_end();
  for (std::size_t i = b; i < e; ++i) {
    Real v = f[i] * w[i];
    if (!zeta.empty()) v *= zeta[i];
    acc += (i == b || i + 1 == e) ? v / 2 : v;
  }
  return acc * g.h;
}

// Cumulative arclength along the extended polyline (segment norms), shifted so
// the first interior node sits at s0. Second-order accurate.
inline std::vector<Real> cumulative_arclength(const DiscreteCurve& g) {
  const std::size_t n = g.total_nodes();
  std::vector<Real> s(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    Real seg = 0;
    for (int c = 0; c < g.dim; ++c) seg += sqr(g.pts[i * g.dim + c] - g.pts[(i - 1) * g.dim + c]);
    s[i] = s[i - 1] + std::sqrt(seg);
  }
  Real shift = g.s0 - s[g.interior_begin()];
  for (auto& v : s) v += shift;
  return s;
}

// Smallest segment length divided by h over all consecutive node pairs
// (including ghost layers; wrapping for periodic curves). Used to detect
// near-degenerate grids during evolution.
inline Real min_segment_ratio(const DiscreteCurve& g) {
  const std::size_t n = g.total_nodes();
  Real best = std::numeric_limits<Real>::infinity();
  std::size_t last = g.ends == EndCondition::Periodic ? n : n - 1;
  for (std::size_t i = 0; i < last; ++i) {
    std::size_t j = (i + 1) % n;
    Real seg = 0;
    for (int c = 0; c < g.dim; ++c) seg += sqr(g.pts[j * g.dim + c] - g.pts[i * g.dim + c]);
    best = std::min(best, std::sqrt(seg) / g.h);
  }
  return best;
}

// Compactly supported weight sampled on the curve's nodes together with the
// Lipschitz bound of the underlying profile (with respect to arclength).
struct CutoffWeight {
  std::vector<Real> values;
  Real lipschitz = 0;

  // Indices [first, last) of the positive part; empty support gives first == last.
  std::pair<std::size_t, std::size_t> support() const {
    std::size_t first = values.size(), last = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] > 0) {
        first = std::min(first, i);
        last = std::max(last, i + 1);
      }
    }
    if (first >= last) return {0, 0};
    return {first, last};
  }
};

namespace detail {
inline Real smoothstep(Real u) {
  u = std::clamp(u, Real(0), Real(1));
  return u * u * (3 - 2 * u);
}
}  // namespace detail

// Plateau cutoff in arclength: 0 outside [a - ramp, b + ramp], 1 on [a, b],
// cubic smoothstep ramps in between. The profile's Lipschitz constant is
// 1.5 / ramp.
inline CutoffWeight smoothstep_cutoff(const DiscreteCurve& g, Real a, Real b, Real ramp) {
  require(ramp > 0, "cutoff ramp width must be positive");
  require(b >= a, "cutoff plateau must be nonempty");
  auto s = cumulative_arclength(g);
  CutoffWeight zeta;
  zeta.lipschitz = Real(1.5) / ramp;
  zeta.values.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    Real up = detail::smoothstep((s[i] - (a - ramp)) / ramp);
    Real down = detail::smoothstep(((b + ramp) - s[i]) / ramp);
    zeta.values[i] = std::min(up, down);
  }
  return zeta;
}

}  // namespace curveflow
