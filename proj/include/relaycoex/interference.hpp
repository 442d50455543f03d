#pragma once

#include <map>
#include <vector>

#include "relaycoex/model.hpp"

namespace relaycoex {

// Wraps an angle into [0, 2*pi).
double wrap_phase(double phi);

// Complex building blocks of the coherent interference at the radar: the
// direct leakage phasor and one forwarded phasor per active relay, with
// magnitudes and phases cached. Phases are in (-pi, pi].
struct CoherentTerms {
  RelaySubset subset;
  cxd a_term{0.0, 0.0};
  double a_mag = 0.0;
  double a_phase = 0.0;
  std::map<int, cxd> b_terms;
  std::map<int, double> b_mag;
  std::map<int, double> b_phase;
};

// Per-relay forwarding phase offsets, canonical in [0, 2*pi). Equivalent
// sample delays are phi / (2*pi*f_s).
struct PhaseAssignment {
  std::map<int, double> phi;

  std::map<int, double> delays(double sampling_frequency) const;
};

// Two-set phase split: relays in `in_phase` align with the direct leakage
// phasor, relays in `anti_phase` oppose it. The direct term always counts
// on the in-phase side. residual is the signed magnitude difference and
// interference its square.
struct PhasePartition {
  std::vector<int> in_phase;
  std::vector<int> anti_phase;
  double residual = 0.0;
  double interference = 0.0;
};

// Average radar interference with phases averaged out, full form: direct
// leakage, residual relay leakage, and each relay's forwarded receive power
// scaled by its amplification gain.
double interference_noncoherent_full(const ChannelRealization& ch, const ScenarioConfig& cfg,
                                     const RelaySubset& subset, const PowerAllocation& alloc);

// Same quantity after the gain identity collapses the forwarded term:
// |h_SP|^2 P_S + sum_k |h_R_kP|^2 P_R_k (1 + zeta_k). Affine in every power.
double interference_noncoherent_simplified(const ChannelRealization& ch,
                                           const ScenarioConfig& cfg,
                                           const RelaySubset& subset,
                                           const PowerAllocation& alloc);

// Builds the coherent phasors at one allocation.
CoherentTerms coherent_terms(const ChannelRealization& ch, const ScenarioConfig& cfg,
                             const RelaySubset& subset, const PowerAllocation& alloc);

// |A + sum_k B_k e^{-j phi_k}|^2, evaluated directly on the phasor sum.
// The assignment must cover exactly the subset of `terms`.
double interference_coherent(const CoherentTerms& terms, const PhaseAssignment& phases);

// The same value through the expanded cosine form: squared magnitudes plus
// twice the pairwise cosine cross terms (each unordered pair counted once).
double interference_coherent_expansion(const CoherentTerms& terms,
                                       const PhaseAssignment& phases);

// Partial derivatives of the coherent interference with respect to each
// relay's phase offset; the direct term's phase is fixed.
std::map<int, double> phase_gradient(const CoherentTerms& terms,
                                     const PhaseAssignment& phases);

// Diagonal second derivatives; negative entries witness nonconvexity in the
// phase variables.
std::map<int, double> phase_hessian_diag(const CoherentTerms& terms,
                                         const PhaseAssignment& phases);

// Residual-squared interference of a phase split, recomputed from the term
// magnitudes. Throws unless in_phase and anti_phase partition the subset.
double interference_coherent_partition(const CoherentTerms& terms,
                                       const PhasePartition& partition);

// Explicit phase offsets realizing a split: in-phase relays rotate onto the
// direct phasor, anti-phase relays onto its opposite.
PhaseAssignment phases_for_partition(const PhasePartition& partition,
                                     const CoherentTerms& terms);

}  // namespace relaycoex
