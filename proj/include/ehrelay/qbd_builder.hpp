#pragma once

#include "ehrelay/linalg.hpp"
#include "ehrelay/model.hpp"

namespace ehrelay {

/// Per-slot energy-buffer transitions, indexed by q_e = 0..N.
///
/// m_tx is the second-subslot move with a backlogged data buffer (spend K if q_e >= K);
/// it splits into m_transmit (rows q_e >= K) and m_idle (rows q_e < K). t_harvest is
/// the first-subslot EH move; b_slot = t_harvest * m_tx, split the same way.
struct EnergyMatrices {
  Matrix m_tx;
  Matrix t_harvest;
  Matrix b_slot;
  Matrix m_transmit;
  Matrix m_idle;
  Matrix b_transmit;
  Matrix b_idle;
};

/// Level blocks of the homogeneous QBD for a static decode probability.
struct QbdBlocks {
  Matrix b00;     // level 0 -> 0
  Matrix b01;     // level 0 -> 1
  Matrix a_up;    // l -> l+1, l >= 1
  Matrix a_same;  // l -> l
  Matrix a_down;  // l -> l-1
};

/// energy_gated: R only transmits (and a packet only leaves R) when q_e >= K at the
/// start of subslot 2. as_published: the success/failure factors multiply the whole
/// of M and B, which lets a packet leave R without energy when q_e < K. The two agree
/// on every row where the energy constraint never binds.
enum class BlockForm { energy_gated, as_published };

Matrix build_m(const SystemParams& params);
Matrix build_t(const SystemParams& params);
EnergyMatrices build_energy_matrices(const SystemParams& params);

QbdBlocks build_blocks(const SystemParams& params, double alpha, BlockForm form = BlockForm::energy_gated);
QbdBlocks build_blocks(const EnergyMatrices& em, const SystemParams& params, double alpha,
                       BlockForm form = BlockForm::energy_gated);

/// E[(q_e + Gamma - N)^+] for each phase: expected units lost to overflow in an EH slot.
Vector expected_overflow(const SystemParams& params);

/// Pr{min(q_e + Gamma, N) >= K} for each phase.
Vector harvest_reaches_k(const SystemParams& params);

}  // namespace ehrelay
