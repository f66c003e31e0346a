#pragma once

#include "curveflow/banded.hpp"
#include "curveflow/curve.hpp"

namespace curveflow {

// Component-wise cubic spline through all stored nodes of a curve, indexed by
// the node number (uniform unit grid). Open curves use not-a-knot ends,
// closed curves a periodic spline. Stored in second-derivative form.
class CurveSpline {
 public:
  explicit CurveSpline(const DiscreteCurve& g)
      : dim_(g.dim), periodic_(g.ends == EndCondition::Periodic),
        n_(g.total_nodes()), y_(g.pts) {
    require(n_ >= 4, "spline needs at least 4 nodes");
    m_.assign(y_.size(), 0.0);
    if (periodic_) {
      const int n = static_cast<int>(n_);
      CyclicBandedLU lu(n, 1);
      const Real row[3] = {1, 4, 1};
      for (int i = 0; i < n; ++i) lu.set_row(i, row);
      lu.factor();
      std::vector<Real> rhs(static_cast<std::size_t>(n));
      for (int c = 0; c < dim_; ++c) {
        for (int i = 0; i < n; ++i) {
          Real ym = yc((i + n - 1) % n, c), y0 = yc(i, c), yp = yc((i + 1) % n, c);
          rhs[static_cast<std::size_t>(i)] = 6 * (ym - 2 * y0 + yp);
        }
        lu.solve(rhs);
        for (int i = 0; i < n; ++i) m_[static_cast<std::size_t>(i) * dim_ + c] = rhs[static_cast<std::size_t>(i)];
      }
    } else {
      const int n = static_cast<int>(n_);
      for (int c = 0; c < dim_; ++c) {
        BandedLU lu(n, 2, 2);
        std::vector<Real> rhs(static_cast<std::size_t>(n), 0.0);
        // not-a-knot: third derivative continuous across the 2nd and (n-1)th node
        lu.at(0, 0) = 1;
        lu.at(0, 1) = -2;
        lu.at(0, 2) = 1;
        lu.at(n - 1, n - 1) = 1;
        lu.at(n - 1, n - 2) = -2;
        lu.at(n - 1, n - 3) = 1;
        for (int i = 1; i + 1 < n; ++i) {
          lu.at(i, i - 1) = 1;
          lu.at(i, i) = 4;
          lu.at(i, i + 1) = 1;
          rhs[static_cast<std::size_t>(i)] = 6 * (yc(i - 1, c) - 2 * yc(i, c) + yc(i + 1, c));
        }
        lu.factor();
        lu.solve(rhs);
        for (int i = 0; i < n; ++i) m_[static_cast<std::size_t>(i) * dim_ + c] = rhs[static_cast<std::size_t>(i)];
      }
    }
    build_arclength_table();
  }

  int dim() const { return dim_; }
  std::size_t nodes() const { return n_; }
  bool periodic() const { return periodic_; }
  // valid parameter range: [0, n-1] open, [0, n] periodic (wrapping)
  Real u_max() const { return periodic_ ? static_cast<Real>(n_) : static_cast<Real>(n_ - 1); }

  void eval(Real u, std::span<Real> out) const {
    auto [i, j, t] = locate(u);
    for (int c = 0; c < dim_; ++c) {
      Real mi = mc(i, c), mj = mc(j, c), yi = yc(i, c), yj = yc(j, c);
      Real omt = 1 - t;
      out[static_cast<std::size_t>(c)] = mi * omt * omt * omt / 6 + mj * t * t * t / 6 +
                                         (yi - mi / 6) * omt + (yj - mj / 6) * t;
    }
  }

  void deriv(Real u, std::span<Real> out) const {
    auto [i, j, t] = locate(u);
    for (int c = 0; c < dim_; ++c) {
      Real mi = mc(i, c), mj = mc(j, c), yi = yc(i, c), yj = yc(j, c);
      Real omt = 1 - t;
      out[static_cast<std::size_t>(c)] =
          -mi * omt * omt / 2 + mj * t * t / 2 + (yj - yi) - (mj - mi) / 6;
    }
  }

  Real speed(Real u) const {
    auto [i, j, t] = locate(u);
    Real omt = 1 - t;
    Real acc = 0;
    for (int c = 0; c < dim_; ++c) {
      Real mi = mc(i, c), mj = mc(j, c), yi = yc(i, c), yj = yc(j, c);
      Real d = -mi * omt * omt / 2 + mj * t * t / 2 + (yj - yi) - (mj - mi) / 6;
      acc += d * d;
    }
    return std::sqrt(acc);
  }

  // Arclength of the spline over [0, u]: cached per-segment prefix sums plus a
  // 5-point Gauss-Legendre tail over the final partial segment.
  Real arclength(Real u) const {
    require(u >= 0 && u <= u_max() + 1e-12, "spline parameter out of range");
    u = std::min(u, u_max());
    if (u >= static_cast<Real>(segment_count())) return cum_.back();
    auto i = static_cast<std::size_t>(u);
    if (u <= static_cast<Real>(i)) return cum_[i];
    return cum_[i] + partial_segment(static_cast<Real>(i), u);
  }

  // Inverse of the arclength function: the u with arclength(u) = s. Binary
  // search over the cached prefix sums picks the segment; safeguarded Newton
  // finishes inside it.
  Real param_at_arclength(Real s, Real total) const {
    require(s >= -1e-9 && s <= total + 1e-9, "arclength out of range");
    s = std::clamp(s, Real(0), cum_.back());
    auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    if (it == cum_.begin()) return 0;
    auto seg = static_cast<std::size_t>(it - cum_.begin()) - 1;
    if (seg >= segment_count()) return u_max();
    Real base = static_cast<Real>(seg);
    Real want = s - cum_[seg];
    Real seg_len = cum_[seg + 1] - cum_[seg];
    if (want <= 0) return base;
    if (want >= seg_len) return base + 1;
    Real lo = 0, hi = 1;
    Real t = want / seg_len;
    for (int iter = 0; iter < 60; ++iter) {
      Real f = partial_segment(base, base + t) - want;
      if (std::abs(f) < 1e-13 * std::max(Real(1), total)) break;
      if (f > 0)
        hi = t;
      else
        lo = t;
      Real sp = speed(base + t);
      Real tn = t - f / std::max(sp, Real(1e-300));
      if (!(tn > lo && tn < hi)) tn = (lo + hi) / 2;
      t = tn;
    }
    return base + t;
  }

 private:
  Real yc(int i, int c) const { return y_[static_cast<std::size_t>(i) * dim_ + c]; }
  Real mc(int i, int c) const { return m_[static_cast<std::size_t>(i) * dim_ + c]; }

  std::size_t segment_count() const { return periodic_ ? n_ : n_ - 1; }

  // 5-point Gauss-Legendre integral of the speed over [a, b] within one
  // spline segment (a at the segment start, b - a <= 1).
  Real partial_segment(Real a, Real b) const {
    static constexpr Real gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                   0.5384693101056831, 0.9061798459386640};
    static constexpr Real gw[5] = {0.2369268850561891, 0.4786286704993665,
                                   0.5688888888888889, 0.4786286704993665,
                                   0.2369268850561891};
    Real mid = (a + b) / 2, half = (b - a) / 2;
    Real acc = 0;
    for (int q = 0; q < 5; ++q) acc += gw[q] * half * speed(mid + half * gx[q]);
    return acc;
  }

  void build_arclength_table() {
    cum_.assign(segment_count() + 1, 0.0);
    for (std::size_t i = 0; i < segment_count(); ++i)
      cum_[i + 1] = cum_[i] + partial_segment(static_cast<Real>(i),
                                              static_cast<Real>(i) + 1);
  }

  struct Seg {
    int i, j;
    Real t;
  };
  Seg locate(Real u) const {
    if (periodic_) {
      Real n = static_cast<Real>(n_);
      u = u - n * std::floor(u / n);
      int i = std::min(static_cast<int>(u), static_cast<int>(n_) - 1);
      return {i, (i + 1) % static_cast<int>(n_), u - i};
    }
    u = std::clamp(u, Real(0), static_cast<Real>(n_ - 1));
    int i = std::min(static_cast<int>(u), static_cast<int>(n_) - 2);
    return {i, i + 1, u - i};
  }

  int dim_;
  bool periodic_;
  std::size_t n_;
  std::vector<Real> y_, m_;
  std::vector<Real> cum_;  // arclength at integer parameters
};

// Redistributes nodes uniformly in arclength. Clamped curves keep their ghost
// layers and the two outermost interior nodes fixed and choose the interior
// node count so the spacing is as close as possible to the nominal h; closed
// curves redistribute all nodes at a fixed count, keeping node 0 at its
// material point. The
// nominal grid parameter h is preserved; the actual node spacing is carried by
// the metric factors.
inline DiscreteCurve resample_arclength(const DiscreteCurve& g) {
  g.validate();
  CurveSpline sp(g);
  DiscreteCurve out = g;
  std::vector<Real> pt(static_cast<std::size_t>(g.dim));
  if (g.ends == EndCondition::Periodic) {
    Real total = sp.arclength(sp.u_max());
    // keep the node count: a shrinking closed curve keeps its angular
    // resolution and the metric factors carry the changing spacing
    auto count = std::max<std::size_t>(g.total_nodes(), 8);
    out.pts.assign(count * static_cast<std::size_t>(g.dim), 0.0);
    for (std::size_t j = 0; j < count; ++j) {
      Real u = sp.param_at_arclength(total * static_cast<Real>(j) / static_cast<Real>(count), total);
      sp.eval(u, pt);
      for (int c = 0; c < g.dim; ++c) out.pts[j * g.dim + c] = pt[static_cast<std::size_t>(c)];
    }
    out.validate();
    return out;
  }
  const std::size_t b = g.interior_begin(), e = g.interior_end();
  Real s_first = sp.arclength(static_cast<Real>(b));
  Real s_last = sp.arclength(static_cast<Real>(e - 1));
  Real L = s_last - s_first;
  require(L > 0, "resample: degenerate interior arclength");
  auto segs = static_cast<std::size_t>(std::llround(L / g.h));
  segs = std::max<std::size_t>(segs, 4);
  const std::size_t count = segs + 1;
  Real total = sp.arclength(sp.u_max());
  out.pts.assign((count + 2 * static_cast<std::size_t>(g.ghost)) * g.dim, 0.0);
  // ghost layers are frozen boundary data: copy verbatim
  for (int k = 0; k < g.ghost; ++k)
    for (int c = 0; c < g.dim; ++c) {
      out.pts[static_cast<std::size_t>(k) * g.dim + c] = g.pts[static_cast<std::size_t>(k) * g.dim + c];
      out.pts[(count + g.ghost + k) * g.dim + c] = g.pts[(e + k) * g.dim + c];
    }
  for (std::size_t j = 0; j < count; ++j) {
    Real target = s_first + L * static_cast<Real>(j) / static_cast<Real>(segs);
    Real u = sp.param_at_arclength(target, total);
    sp.eval(u, pt);
    for (int c = 0; c < g.dim; ++c)
      out.pts[(j + g.ghost) * g.dim + c] = pt[static_cast<std::size_t>(c)];
  }
  out.validate();
  return out;
}

}  // namespace curveflow
