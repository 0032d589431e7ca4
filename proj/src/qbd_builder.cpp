#include "ehrelay/qbd_builder.hpp"

#include <algorithm>

namespace ehrelay {

Matrix build_m(const SystemParams& params) {
  const int n = params.phases();
  const int k = params.k_cost;
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i < k ? i : i - k) = 1.0;
  }
  return m;
}

Matrix build_t(const SystemParams& params) {
  const int n = params.phases();
  const int cap = params.n_cap;
  Matrix t = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m <= params.b_max(); ++m) {
      t(i, std::min(i + m, cap)) += params.energy.prob(m);
    }
  }
  return t;
}

EnergyMatrices build_energy_matrices(const SystemParams& params) {
  const int n = params.phases();
  EnergyMatrices em;
  em.m_tx = build_m(params);
  em.t_harvest = build_t(params);
  em.b_slot = em.t_harvest * em.m_tx;
  em.m_transmit = Matrix::Zero(n, n);
  em.m_idle = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (i >= params.k_cost) {
      em.m_transmit(i, i - params.k_cost) = 1.0;
    } else {
      em.m_idle(i, i) = 1.0;
    }
  }
  em.b_transmit = em.t_harvest * em.m_transmit;
  em.b_idle = em.t_harvest * em.m_idle;
  return em;
}

QbdBlocks build_blocks(const SystemParams& params, double alpha, BlockForm form) {
  return build_blocks(build_energy_matrices(params), params, alpha, form);
}

QbdBlocks build_blocks(const EnergyMatrices& em, const SystemParams& params, double alpha, BlockForm form) {
  const double ps = params.p_det_s;
  const double pr = params.p_det_r;
  const double a = alpha;
  const Matrix id = Matrix::Identity(params.phases(), params.phases());

  QbdBlocks q;
  if (form == BlockForm::as_published) {
    q.b00 = a * (1 - ps) * pr * em.m_tx + a * ps * id + (1 - a) * em.t_harvest;
    q.b01 = a * (1 - ps) * (1 - pr) * em.m_tx;
    q.a_same = a * ((1 - ps) * pr + ps * (1 - pr)) * em.m_tx + (1 - a) * (1 - pr) * em.b_slot;
    q.a_up = a * (1 - ps) * (1 - pr) * em.m_tx;
    q.a_down = a * ps * pr * em.m_tx + (1 - a) * pr * em.b_slot;
    return q;
  }

  // Level 0, DD mode: S detected directly (identity), or R stores the packet and
  // tries it in subslot 2 only if q_e >= K.
  q.b00 = a * (1 - ps) * pr * em.m_transmit + a * ps * id + (1 - a) * em.t_harvest;
  q.b01 = a * (1 - ps) * (1 - pr) * em.m_transmit + a * (1 - ps) * em.m_idle;
  // Levels >= 1.
  q.a_same = a * ((1 - ps) * pr + ps * (1 - pr)) * em.m_transmit + a * ps * em.m_idle +
             (1 - a) * ((1 - pr) * em.b_transmit + em.b_idle);
  q.a_up = a * (1 - ps) * (1 - pr) * em.m_transmit + a * (1 - ps) * em.m_idle;
  q.a_down = a * ps * pr * em.m_transmit + (1 - a) * pr * em.b_transmit;
  return q;
}

Vector expected_overflow(const SystemParams& params) {
  const int n = params.phases();
  Vector v = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m <= params.b_max(); ++m) {
      const int over = i + m - params.n_cap;
      if (over > 0) v(i) += over * params.energy.prob(m);
    }
  }
  return v;
}

Vector harvest_reaches_k(const SystemParams& params) {
  const int n = params.phases();
  Vector v = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m <= params.b_max(); ++m) {
      if (std::min(i + m, params.n_cap) >= params.k_cost) v(i) += params.energy.prob(m);
    }
  }
  return v;
}

}  // namespace ehrelay
