#include "relaycoex/interference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "relaycoex/rate.hpp"

namespace relaycoex {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double abs2(const cxd& z) { return std::norm(z); }

void check_phases_cover(const CoherentTerms& terms, const PhaseAssignment& phases) {
  if (phases.phi.size() != terms.subset.indices.size()) {
    throw std::invalid_argument("phase assignment does not match relay subset");
  }
  for (int k : terms.subset.indices) {
    if (phases.phi.find(k) == phases.phi.end()) {
      throw std::invalid_argument("phase assignment missing relay " + std::to_string(k));
    }
  }
}

}  // namespace

double wrap_phase(double phi) {
  double y = std::fmod(phi, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  if (y >= kTwoPi) y = 0.0;
  return y;
}

std::map<int, double> PhaseAssignment::delays(double sampling_frequency) const {
  std::map<int, double> d;
  for (const auto& [k, p] : phi) d[k] = p / (kTwoPi * sampling_frequency);
  return d;
}

double interference_noncoherent_full(const ChannelRealization& ch, const ScenarioConfig& cfg,
                                     const RelaySubset& subset, const PowerAllocation& alloc) {
  subset.validate(cfg.relay_count);
  double acc = alloc.p_s * abs2(ch.h_sp);
  for (int k : subset.indices) {
    const int ki = k - 1;
    acc += abs2(ch.h_rp[static_cast<size_t>(ki)]) * cfg.zeta[static_cast<size_t>(ki)] *
           alloc.relay_power(k);
  }
  for (int k : subset.indices) {
    const int ki = k - 1;
    const double g = amplification_gain(ch, cfg, subset, alloc, k);
    // Forwarded receive power: the same bracket that defines the gain.
    double bracket = alloc.p_s * abs2(ch.h_sr[static_cast<size_t>(ki)]);
    for (int j : subset.indices) {
      const int ji = j - 1;
      bracket += abs2(ch.rr(ji, ki)) * cfg.zeta[static_cast<size_t>(ji)] *
                 alloc.relay_power(j);
    }
    bracket += cfg.noise_power_relay[static_cast<size_t>(ki)];
    acc += g * g * abs2(ch.h_rp[static_cast<size_t>(ki)]) * alloc.relay_power(k) * bracket;
  }
  return acc;
}

double interference_noncoherent_simplified(const ChannelRealization& ch,
                                           const ScenarioConfig& cfg,
                                           const RelaySubset& subset,
                                           const PowerAllocation& alloc) {
  subset.validate(cfg.relay_count);
  double acc = alloc.p_s * abs2(ch.h_sp);
  for (int k : subset.indices) {
    const int ki = k - 1;
    acc += abs2(ch.h_rp[static_cast<size_t>(ki)]) * alloc.relay_power(k) *
           (1.0 + cfg.zeta[static_cast<size_t>(ki)]);
  }
  return acc;
}

CoherentTerms coherent_terms(const ChannelRealization& ch, const ScenarioConfig& cfg,
                             const RelaySubset& subset, const PowerAllocation& alloc) {
  subset.validate(cfg.relay_count);
  CoherentTerms t;
  t.subset = subset;

  cxd a = ch.h_sp * std::sqrt(alloc.p_s);
  for (int k : subset.indices) {
    const int ki = k - 1;
    a += ch.h_rp[static_cast<size_t>(ki)] *
         std::sqrt(cfg.zeta[static_cast<size_t>(ki)] * alloc.relay_power(k));
  }
  t.a_term = a;
  t.a_mag = std::abs(a);
  t.a_phase = std::arg(a);

  for (int k : subset.indices) {
    const int ki = k - 1;
    // What relay k forwards: received source phasor, residual loop phasors
    // from every active relay, and its own noise at unit phasor (1+j)/sqrt(2).
    cxd inner = ch.h_sr[static_cast<size_t>(ki)] * std::sqrt(alloc.p_s);
    for (int i : subset.indices) {
      const int ii = i - 1;
      inner += ch.rr(ii, ki) *
               std::sqrt(cfg.zeta[static_cast<size_t>(ii)] * alloc.relay_power(i));
    }
    const double sigma = std::sqrt(cfg.noise_power_relay[static_cast<size_t>(ki)]);
    inner += cxd(sigma / std::sqrt(2.0), sigma / std::sqrt(2.0));

    const double g = amplification_gain(ch, cfg, subset, alloc, k);
    const cxd b = inner * g * ch.h_rp[static_cast<size_t>(ki)] *
                  std::sqrt(alloc.relay_power(k));
    t.b_terms[k] = b;
    t.b_mag[k] = std::abs(b);
    t.b_phase[k] = std::arg(b);
  }
  return t;
}

double interference_coherent(const CoherentTerms& terms, const PhaseAssignment& phases) {
  check_phases_cover(terms, phases);
  cxd acc = terms.a_term;
  for (int k : terms.subset.indices) {
    const double phi = phases.phi.at(k);
    acc += terms.b_terms.at(k) * std::polar(1.0, -phi);
  }
  return abs2(acc);
}

double interference_coherent_expansion(const CoherentTerms& terms,
                                       const PhaseAssignment& phases) {
  check_phases_cover(terms, phases);
  // Rotated phases with the direct term prepended at fixed offset zero.
  std::vector<double> mag;
  std::vector<double> theta;
  mag.push_back(terms.a_mag);
  theta.push_back(terms.a_phase);
  for (int k : terms.subset.indices) {
    mag.push_back(terms.b_mag.at(k));
    theta.push_back(terms.b_phase.at(k) - phases.phi.at(k));
  }
  const size_t n = mag.size();
  double acc = 0.0;
  for (size_t k = 0; k < n; ++k) acc += mag[k] * mag[k];
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = k + 1; i < n; ++i) {
      acc += 2.0 * mag[k] * mag[i] * std::cos(theta[k] - theta[i]);
    }
  }
  return acc;
}

std::map<int, double> phase_gradient(const CoherentTerms& terms,
                                     const PhaseAssignment& phases) {
  check_phases_cover(terms, phases);
  std::map<int, double> grad;
  for (int k : terms.subset.indices) {
    const double mk = terms.b_mag.at(k);
    const double tk = terms.b_phase.at(k) - phases.phi.at(k);
    double g = 2.0 * mk * terms.a_mag * std::sin(tk - terms.a_phase);
    for (int i : terms.subset.indices) {
      if (i == k) continue;
      const double ti = terms.b_phase.at(i) - phases.phi.at(i);
      g += 2.0 * mk * terms.b_mag.at(i) * std::sin(tk - ti);
    }
    grad[k] = g;
  }
  return grad;
}

std::map<int, double> phase_hessian_diag(const CoherentTerms& terms,
                                         const PhaseAssignment& phases) {
  check_phases_cover(terms, phases);
  std::map<int, double> hess;
  for (int k : terms.subset.indices) {
    const double mk = terms.b_mag.at(k);
    const double tk = terms.b_phase.at(k) - phases.phi.at(k);
    double h = -2.0 * mk * terms.a_mag * std::cos(tk - terms.a_phase);
    for (int i : terms.subset.indices) {
      if (i == k) continue;
      const double ti = terms.b_phase.at(i) - phases.phi.at(i);
      h += -2.0 * mk * terms.b_mag.at(i) * std::cos(tk - ti);
    }
    hess[k] = h;
  }
  return hess;
}

double interference_coherent_partition(const CoherentTerms& terms,
                                       const PhasePartition& partition) {
  std::vector<int> all;
  all.reserve(partition.in_phase.size() + partition.anti_phase.size());
  all.insert(all.end(), partition.in_phase.begin(), partition.in_phase.end());
  all.insert(all.end(), partition.anti_phase.begin(), partition.anti_phase.end());
  std::sort(all.begin(), all.end());
  if (all != terms.subset.indices) {
    throw std::invalid_argument("phase partition does not cover the relay subset");
  }
  double d = terms.a_mag;
  for (int k : partition.in_phase) d += terms.b_mag.at(k);
  for (int k : partition.anti_phase) d -= terms.b_mag.at(k);
  return d * d;
}

PhaseAssignment phases_for_partition(const PhasePartition& partition,
                                     const CoherentTerms& terms) {
  PhaseAssignment out;
  for (int k : partition.in_phase) {
    out.phi[k] = wrap_phase(terms.b_phase.at(k) - terms.a_phase);
  }
  for (int k : partition.anti_phase) {
    out.phi[k] = wrap_phase(terms.b_phase.at(k) - terms.a_phase + kTwoPi / 2.0);
  }
  return out;
}

}  // namespace relaycoex
