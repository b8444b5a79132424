#pragma once

// Rainflow cycle extraction and lifetime models: Coffin-Manson thermal cycling
// with Miner's-rule accumulation, plus temperature-normalized NBTI, HCI and EM
// MTTF indices.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tcmap/errors.hpp"
#include "tcmap/thermal.hpp"

namespace tcmap {

inline constexpr double kBoltzmannEvPerK = 8.62e-5;
inline constexpr double kKelvinOffset = 273.15;
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kSecondsPerYear = 8760.0 * kSecondsPerHour;

inline double to_kelvin(double celsius) { return celsius + kKelvinOffset; }

struct ThermalCycle {
  double delta_t_c = 0.0;
  double t_max_c = 0.0;
  double duration_s = 0.0;
  double weight = 1.0;  // 1.0 full cycle, 0.5 half cycle

  bool operator==(const ThermalCycle&) const = default;
};

struct CycleSet {
  std::vector<ThermalCycle> cycles;
  double total_time_s = 0.0;

  /// Effective cycle count m.
  double count() const {
    double m = 0.0;
    for (const auto& c : cycles) m += c.weight;
    return m;
  }
};

/// Reduces a sampled trace to its sequence of turning points. Plateaus keep the
/// time of their first sample; the first and last samples are always kept.
inline std::vector<TraceSample> turning_points(std::span<const TraceSample> samples) {
  std::vector<TraceSample> dedup;
  dedup.reserve(samples.size());
  for (const auto& s : samples)
    if (dedup.empty() || s.temp_c != dedup.back().temp_c) dedup.push_back(s);
  if (dedup.size() <= 2) return dedup;

  std::vector<TraceSample> out;
  out.reserve(dedup.size());
  out.push_back(dedup.front());
  for (std::size_t i = 1; i + 1 < dedup.size(); ++i) {
    const double before = dedup[i].temp_c - dedup[i - 1].temp_c;
    const double after = dedup[i + 1].temp_c - dedup[i].temp_c;
    if ((before > 0) != (after > 0)) out.push_back(dedup[i]);
  }
  out.push_back(dedup.back());
  return out;
}

namespace detail {

inline ThermalCycle make_cycle(const TraceSample& a, const TraceSample& b, double weight) {
  return ThermalCycle{std::fabs(b.temp_c - a.temp_c), std::max(a.temp_c, b.temp_c), std::fabs(b.time_s - a.time_s),
                      weight};
}

}  // namespace detail

/// Four-point rainflow counting. A range bounded on both sides by ranges at
/// least as large is closed as a full cycle and its two points removed; the
/// residue yields half cycles between consecutive points.
inline CycleSet rainflow_count(std::span<const TraceSample> samples) {
  if (samples.empty()) throw InputError("rainflow_count: empty trace");
  CycleSet result;
  result.total_time_s = samples.back().time_s - samples.front().time_s;

  std::vector<TraceSample> stack;
  for (const auto& point : turning_points(samples)) {
    stack.push_back(point);
    while (stack.size() >= 4) {
      const std::size_t n = stack.size();
      const double outer_left = std::fabs(stack[n - 3].temp_c - stack[n - 4].temp_c);
      const double inner = std::fabs(stack[n - 2].temp_c - stack[n - 3].temp_c);
      const double outer_right = std::fabs(stack[n - 1].temp_c - stack[n - 2].temp_c);
      if (inner > outer_left || inner > outer_right) break;
      result.cycles.push_back(detail::make_cycle(stack[n - 3], stack[n - 2], 1.0));
      stack.erase(stack.end() - 3, stack.end() - 1);
    }
  }
  for (std::size_t i = 0; i + 1 < stack.size(); ++i)
    result.cycles.push_back(detail::make_cycle(stack[i], stack[i + 1], 0.5));
  return result;
}

inline CycleSet rainflow_count(const TemperatureTrace& trace) { return rainflow_count(trace.samples); }

struct TcParams {
  double a_tc = 1.0;
  double b = 2.35;
  double t_th_c = 1.0;
  double e_a_ev = 0.42;
  double k_ev_per_k = kBoltzmannEvPerK;
};

inline void validate(const TcParams& p) {
  if (!(p.a_tc > 0)) throw InputError("reliability.a_tc must be > 0");
  if (!(p.b > 0)) throw InputError("reliability.b must be > 0");
  if (!(p.e_a_ev > 0)) throw InputError("reliability.e_a_ev must be > 0");
  if (!(p.k_ev_per_k > 0)) throw InputError("Boltzmann constant must be > 0");
}

/// Coffin-Manson cycles to failure for one cycle amplitude and peak temperature.
inline double cycles_to_failure(double delta_t_c, double t_max_c, const TcParams& p) {
  if (!(delta_t_c > p.t_th_c))
    throw AmplitudeBelowThreshold("cycle amplitude " + std::to_string(delta_t_c) +
                                  " C is not above the threshold " + std::to_string(p.t_th_c) + " C");
  return p.a_tc * std::pow(delta_t_c - p.t_th_c, -p.b) * std::exp(p.e_a_ev / (p.k_ev_per_k * to_kelvin(t_max_c)));
}

inline double cycles_to_failure(const ThermalCycle& cycle, const TcParams& p) {
  return cycles_to_failure(cycle.delta_t_c, cycle.t_max_c, p);
}

/// Miner's-rule damage accrued over the observed span; sub-threshold cycles
/// contribute nothing.
inline double tc_damage(const CycleSet& cs, const TcParams& p) {
  double damage = 0.0;
  for (const auto& c : cs.cycles)
    if (c.delta_t_c > p.t_th_c) damage += c.weight / cycles_to_failure(c, p);
  return damage;
}

/// Time to accumulate unit damage, assuming the observed span repeats. For m
/// identical cycles spanning m * t this is N_TC * t.
inline double mttf_tc(const CycleSet& cs, const TcParams& p) {
  const double damage = tc_damage(cs, p);
  if (damage <= 0.0) return std::numeric_limits<double>::infinity();
  return cs.total_time_s / damage;
}

/// A_TC such that `cycle_count` identical cycles of `cycle_duration_s` give an
/// MTTF of `target_mttf_s`. The count cancels; it is accepted for symmetry with
/// the calibration block.
inline double calibrate_atc(double target_mttf_s, double delta_t_c, double t_th_c, double b, double t_max_c,
                            double e_a_ev, double cycle_count, double cycle_duration_s,
                            double k_ev_per_k = kBoltzmannEvPerK) {
  if (!(delta_t_c > t_th_c)) throw DomainError("calibrate_atc: delta_t_c must exceed t_th_c");
  if (!(target_mttf_s > 0 && b > 0 && e_a_ev > 0 && cycle_count > 0 && cycle_duration_s > 0))
    throw DomainError("calibrate_atc: parameters must be positive");
  const double cycles_needed = target_mttf_s / cycle_duration_s;
  return cycles_needed * std::pow(delta_t_c - t_th_c, b) / std::exp(e_a_ev / (k_ev_per_k * to_kelvin(t_max_c)));
}

struct CalibrationBlock {
  double target_years = 10.0;
  double delta_t_c = 20.0;
  double t_max_c = 70.0;
  double m = 10.0;
  double cycle_hours = 1.0;
};

inline TcParams calibrated(TcParams p, const CalibrationBlock& cal) {
  p.a_tc = calibrate_atc(cal.target_years * kSecondsPerYear, cal.delta_t_c, p.t_th_c, p.b, cal.t_max_c, p.e_a_ev,
                         cal.m, cal.cycle_hours * kSecondsPerHour, p.k_ev_per_k);
  return p;
}

// Aging indices. Each proportional MTTF model is evaluated at T and divided by
// its value at the reference temperature, so the prefactors cancel.
// The default fitting constants are illustrative stand-ins, not measured values.

struct NbtiParams {
  double a = 0.005;
  double b_ev = 0.35;
  double c = 1.0e-10;
  double d_ev = 0.1;
  double beta = 0.3;
};

struct HciParams {
  double i_sub_a = 1.0e-3;
  double width_m = 1.0e-6;
  double n = 3.0;
  double q_ev = 0.1;
};

struct EmParams {
  double i_a = 1.0e-3;
  double n = 2.0;
  double q_ev = 0.9;
};

struct AgingParams {
  NbtiParams nbti;
  HciParams hci;
  EmParams em;
  double t_ref_c = 45.0;
};

inline void validate(const AgingParams& p) {
  if (!(p.nbti.a > 0 && p.nbti.c > 0 && p.nbti.beta > 0)) throw InputError("nbti: a, c and beta must be > 0");
  if (!(p.nbti.b_ev > 0 && p.nbti.d_ev > 0)) throw InputError("nbti: energies must be > 0");
  if (!(p.hci.q_ev > 0 && p.em.q_ev > 0)) throw InputError("hci/em: activation energies must be > 0");
  if (!(p.em.n >= 1.0 && p.em.n <= 2.0)) throw InputError("em.n must lie in [1, 2]");
  if (!(p.hci.i_sub_a > 0 && p.hci.width_m > 0 && p.em.i_a > 0)) throw InputError("hci/em: currents and widths must be > 0");
}

inline double nbti_mttf_raw(double t_c, const NbtiParams& p, double k = kBoltzmannEvPerK) {
  const double kt = k * to_kelvin(t_c);
  const double x = p.a / (1.0 + 2.0 * std::exp(p.b_ev / kt));
  if (!(x > 0.0) || !(x - p.c > 0.0))
    throw DomainError("nbti: log arguments are non-positive at " + std::to_string(t_c) + " C");
  const double log_term = -std::log1p(-p.c / x);  // ln(x) - ln(x - c)
  const double base = log_term * to_kelvin(t_c) / std::exp(p.d_ev / kt);
  return std::pow(base, 1.0 / p.beta);
}

inline double hci_mttf_raw(double t_c, const HciParams& p, double k = kBoltzmannEvPerK) {
  if (!(p.i_sub_a > 0 && p.width_m > 0)) throw DomainError("hci: substrate current and width must be > 0");
  return std::pow(p.i_sub_a / p.width_m, -p.n) * std::exp(p.q_ev / (k * to_kelvin(t_c)));
}

inline double em_mttf_raw(double t_c, const EmParams& p, double k = kBoltzmannEvPerK) {
  if (!(p.i_a > 0)) throw DomainError("em: current must be > 0");
  return std::pow(p.i_a, -p.n) * std::exp(p.q_ev / (k * to_kelvin(t_c)));
}

inline double nbti_index(double t_c, const AgingParams& p) {
  return nbti_mttf_raw(t_c, p.nbti) / nbti_mttf_raw(p.t_ref_c, p.nbti);
}

inline double hci_index(double t_c, const AgingParams& p) {
  return hci_mttf_raw(t_c, p.hci) / hci_mttf_raw(p.t_ref_c, p.hci);
}

inline double em_index(double t_c, const AgingParams& p) {
  return em_mttf_raw(t_c, p.em) / em_mttf_raw(p.t_ref_c, p.em);
}

}  // namespace tcmap
