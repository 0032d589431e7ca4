#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include "ehrelay/linalg.hpp"
#include "ehrelay/model.hpp"

namespace ehrelay::testing {

/// splitmix64 stream; every property test draws from its own fixed seed.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

 private:
  std::uint64_t state_;
};

/// A valid parameter set with N <= max_n. Energy is uniform or a random simplex point.
inline SystemParams random_params(Gen& g, int max_k = 8, int max_extra = 12) {
  SystemParams p;
  p.p_det_s = g.uniform(0.05, 0.9);
  p.p_det_r = g.uniform(0.1, 0.99);
  p.k_cost = g.integer(1, max_k);
  p.n_cap = 2 * p.k_cost + g.integer(0, max_extra);
  const int b_max = g.integer(1, p.k_cost);
  if (g.uniform() < 0.5) {
    p.energy = EnergyDistribution::uniform(b_max);
  } else {
    std::vector<double> w(static_cast<std::size_t>(b_max) + 1);
    double sum = 0.0;
    for (auto& x : w) sum += (x = g.uniform(0.05, 1.0));
    for (auto& x : w) x /= sum;
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) rest -= w[i];
    w.back() = rest;
    p.energy = EnergyDistribution(w);
  }
  return p;
}

/// Transition matrix over (q_d, q_e), q_d = 0..max_qd, built by walking the slot protocol
/// event by event. Arrivals that would exceed max_qd are held at max_qd.
inline Matrix protocol_chain(const SystemParams& p, const std::function<double(long, int)>& alpha, long max_qd) {
  const int n = p.phases();
  const auto idx = [n](long d, int e) { return static_cast<Eigen::Index>(d * n + e); };
  Matrix out = Matrix::Zero(idx(max_qd + 1, 0), idx(max_qd + 1, 0));
  for (long d = 0; d <= max_qd; ++d) {
    for (int e = 0; e < n; ++e) {
      const auto from = idx(d, e);
      auto second = [&](long d1, int e1, double w) {
        if (w == 0.0) return;
        if (d1 >= 1 && e1 >= p.k_cost) {
          out(from, idx(d1 - 1, e1 - p.k_cost)) += w * p.p_det_r;
          out(from, idx(d1, e1 - p.k_cost)) += w * (1 - p.p_det_r);
        } else {
          out(from, idx(d1, e1)) += w;
        }
      };
      const double a = alpha(d, e);
      second(d, e, a * p.p_det_s);
      second(std::min(d + 1, max_qd), e, a * (1 - p.p_det_s));
      for (int m = 0; m <= p.b_max(); ++m) second(d, std::min(e + m, p.n_cap), (1 - a) * p.energy.prob(m));
    }
  }
  return out;
}

/// pi P = pi by iterating the lazy chain (I + P)/2 from the uniform vector.
inline RowVector power_iteration(const Matrix& p, double tol = 1e-15, long max_iter = 10'000'000) {
  RowVector pi = RowVector::Constant(p.rows(), 1.0 / static_cast<double>(p.rows()));
  for (long it = 0; it < max_iter; ++it) {
    RowVector next = 0.5 * (pi + pi * p);
    next /= next.sum();
    const double delta = (next - pi).cwiseAbs().maxCoeff();
    pi = next;
    if (delta < tol) break;
  }
  return pi;
}

/// pi P = pi, sum pi = 1 by a dense LU solve with the last balance column replaced.
inline RowVector direct_stationary(const Matrix& p) {
  const Eigen::Index n = p.rows();
  Matrix g = p - Matrix::Identity(n, n);
  g.col(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  const Vector x = g.transpose().fullPivLu().solve(rhs);
  return x.transpose();
}

}  // namespace ehrelay::testing
