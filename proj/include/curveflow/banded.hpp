#pragma once

#include <array>

#include "curveflow/common.hpp"

namespace curveflow {

// General banded matrix with kl sub- and ku super-diagonals, LU factorization
// with partial pivoting (band storage with kl fill rows, as in the classic
// reference implementations). Assembly via at(i, j), then factor(), then any
// number of in-place solves.
class BandedLU {
 public:
  BandedLU(int n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
        ab_(static_cast<std::size_t>(ldab_) * n_, 0.0), ipiv_(n_, 0) {
    require(n >= 1 && kl >= 0 && ku >= 0, "invalid banded matrix shape");
  }

  int size() const { return n_; }

  // Entry A(i, j); valid while |i - j| is within the band (plus fill space
  // above the superdiagonals, used internally during pivoting).
  Real& at(int i, int j) {
    int r = kl_ + ku_ + i - j;
    require(j >= 0 && j < n_ && r >= 0 && r < ldab_, "banded index outside band");
    return ab_[static_cast<std::size_t>(ldab_) * j + r];
  }
  Real get(int i, int j) const {
    int r = kl_ + ku_ + i - j;
    if (j < 0 || j >= n_ || r < kl_ || r >= ldab_) return 0;
    return ab_[static_cast<std::size_t>(ldab_) * j + r];
  }

  void factor() {
    auto a = [&](int i, int j) -> Real& {
      return ab_[static_cast<std::size_t>(ldab_) * j + (kl_ + ku_ + i - j)];
    };
    for (int j = 0; j < n_; ++j) {
      int imax = std::min(j + kl_, n_ - 1);
      int p = j;
      Real best = std::abs(a(j, j));
      for (int i = j + 1; i <= imax; ++i) {
        Real v = std::abs(a(i, j));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (!(best > 0)) throw SolverError("banded LU: matrix is singular");
      ipiv_[j] = p;
      int cmax = std::min(j + kl_ + ku_, n_ - 1);
      if (p != j)
        for (int c = j; c <= cmax; ++c) std::swap(a(j, c), a(p, c));
      Real piv = a(j, j);
      for (int i = j + 1; i <= imax; ++i) {
        Real l = a(i, j) / piv;
        a(i, j) = l;
        for (int c = j + 1; c <= cmax; ++c) a(i, c) -= l * a(j, c);
      }
    }
    factored_ = true;
  }

  void solve(std::span<Real> b) const {
    require(factored_, "banded LU: solve before factor");
    require(static_cast<int>(b.size()) == n_, "banded LU: rhs size mismatch");
    auto a = [&](int i, int j) -> Real {
      return ab_[static_cast<std::size_t>(ldab_) * j + (kl_ + ku_ + i - j)];
    };
    for (int j = 0; j < n_; ++j) {
      if (ipiv_[j] != j) std::swap(b[j], b[ipiv_[j]]);
      int imax = std::min(j + kl_, n_ - 1);
      for (int i = j + 1; i <= imax; ++i) b[i] -= a(i, j) * b[j];
    }
    for (int j = n_ - 1; j >= 0; --j) {
      b[j] /= a(j, j);
      int imin = std::max(0, j - kl_ - ku_);
      for (int i = imin; i < j; ++i) b[i] -= a(i, j) * b[j];
    }
  }

 private:
  int n_, kl_, ku_, ldab_;
  std::vector<Real> ab_;
  std::vector<int> ipiv_;
  bool factored_ = false;
};

// Cyclic (periodic) banded solver with halfwidth p: each row i holds the
// 2p + 1 coefficients of unknowns i - p .. i + p with wrapping indices. Solved
// by a banded core factorization plus a rank-2p corner correction
// (Woodbury formula with a dense q x q capacitance system, q = 2p).
class CyclicBandedLU {
 public:
  CyclicBandedLU(int n, int p)
      : n_(n), p_(p), core_(n, p, p), q_(2 * p),
        corner_rows_(), v_(static_cast<std::size_t>(2 * p) * n, 0.0) {
    require(p >= 1 && p <= 2, "cyclic banded solver supports halfwidth 1 or 2");
    require(n >= 3 * p + 2, "cyclic banded solver: system too small for the band");
    for (int r = 0; r < p_; ++r) corner_rows_.push_back(r);
    for (int r = n_ - p_; r < n_; ++r) corner_rows_.push_back(r);
  }

  // coefs[k + p] multiplies unknown (i + k) mod n.
  void set_row(int i, std::span<const Real> coefs) {
    require(static_cast<int>(coefs.size()) == 2 * p_ + 1,
            "cyclic banded row: wrong coefficient count");
    for (int k = -p_; k <= p_; ++k) {
      int j = i + k;
      Real c = coefs[k + p_];
      if (j >= 0 && j < n_) {
        core_.at(i, j) = c;
      } else {
        int jw = (j + n_) % n_;
        int slot = corner_slot(i);
        require(slot >= 0, "cyclic banded row: wrap entry outside corner rows");
        v_[static_cast<std::size_t>(slot) * n_ + jw] += c;
      }
    }
  }

  void factor() {
    core_.factor();
    // y_[:, r] = core^{-1} e_{corner_rows_[r]}
    y_.assign(static_cast<std::size_t>(q_) * n_, 0.0);
    for (int r = 0; r < q_; ++r) {
      std::span<Real> col(y_.data() + static_cast<std::size_t>(r) * n_,
                          static_cast<std::size_t>(n_));
      col[static_cast<std::size_t>(corner_rows_[r])] = 1.0;
      core_.solve(col);
    }
    // capacitance S = I + V^T Y with V columns v_r
    s_.assign(static_cast<std::size_t>(q_) * q_, 0.0);
    for (int r = 0; r < q_; ++r) {
      for (int c = 0; c < q_; ++c) {
        Real acc = r == c ? 1.0 : 0.0;
        const Real* vr = v_.data() + static_cast<std::size_t>(r) * n_;
        const Real* yc = y_.data() + static_cast<std::size_t>(c) * n_;
        for (int i = 0; i < n_; ++i) acc += vr[i] * yc[i];
        s_[static_cast<std::size_t>(r) * q_ + c] = acc;
      }
    }
    factor_small();
    factored_ = true;
  }

  void solve(std::span<Real> b) const {
    require(factored_, "cyclic banded LU: solve before factor");
    require(static_cast<int>(b.size()) == n_, "cyclic banded LU: rhs size mismatch");
    core_.solve(b);
    std::array<Real, 4> z{};
    for (int r = 0; r < q_; ++r) {
      Real acc = 0;
      const Real* vr = v_.data() + static_cast<std::size_t>(r) * n_;
      for (int i = 0; i < n_; ++i) acc += vr[i] * b[i];
      z[static_cast<std::size_t>(r)] = acc;
    }
    solve_small(z);
    for (int r = 0; r < q_; ++r) {
      const Real* yr = y_.data() + static_cast<std::size_t>(r) * n_;
      for (int i = 0; i < n_; ++i) b[i] -= yr[i] * z[static_cast<std::size_t>(r)];
    }
  }

 private:
  int corner_slot(int row) const {
    for (int r = 0; r < q_; ++r)
      if (corner_rows_[r] == row) return r;
    return -1;
  }

  void factor_small() {
    sp_.assign(static_cast<std::size_t>(q_), 0);
    for (int j = 0; j < q_; ++j) {
      int p = j;
      Real best = std::abs(s_[static_cast<std::size_t>(j) * q_ + j]);
      for (int i = j + 1; i < q_; ++i) {
        Real v = std::abs(s_[static_cast<std::size_t>(i) * q_ + j]);
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (!(best > 0)) throw SolverError("cyclic banded LU: singular corner system");
      sp_[static_cast<std::size_t>(j)] = p;
      if (p != j)
        for (int c = 0; c < q_; ++c)
          std::swap(s_[static_cast<std::size_t>(j) * q_ + c],
                    s_[static_cast<std::size_t>(p) * q_ + c]);
      Real piv = s_[static_cast<std::size_t>(j) * q_ + j];
      for (int i = j + 1; i < q_; ++i) {
        Real l = s_[static_cast<std::size_t>(i) * q_ + j] / piv;
        s_[static_cast<std::size_t>(i) * q_ + j] = l;
        for (int c = j + 1; c < q_; ++c)
          s_[static_cast<std::size_t>(i) * q_ + c] -= l * s_[static_cast<std::size_t>(j) * q_ + c];
      }
    }
  }

  void solve_small(std::array<Real, 4>& z) const {
    for (int j = 0; j < q_; ++j) {
      int p = sp_[static_cast<std::size_t>(j)];
      if (p != j) std::swap(z[static_cast<std::size_t>(j)], z[static_cast<std::size_t>(p)]);
      for (int i = j + 1; i < q_; ++i)
        z[static_cast<std::size_t>(i)] -= s_[static_cast<std::size_t>(i) * q_ + j] * z[static_cast<std::size_t>(j)];
    }
    for (int j = q_ - 1; j >= 0; --j) {
      z[static_cast<std::size_t>(j)] /= s_[static_cast<std::size_t>(j) * q_ + j];
      for (int i = 0; i < j; ++i)
        z[static_cast<std::size_t>(i)] -= s_[static_cast<std::size_t>(i) * q_ + j] * z[static_cast<std::size_t>(j)];
    }
  }

  int n_, p_;
  BandedLU core_;
  int q_;
  std::vector<int> corner_rows_;
  std::vector<Real> v_;      // q rows of corner corrections, dense length n
  std::vector<Real> y_;      // core^{-1} applied to corner unit vectors
  std::vector<Real> s_;      // q x q capacitance matrix (factored in place)
  std::vector<int> sp_;      // pivots of the capacitance factorization
  bool factored_ = false;
};

}  // namespace curveflow
