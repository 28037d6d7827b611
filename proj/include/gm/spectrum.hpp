#pragma once

// Power spectral density of GM symbol sequences, out-of-band power and the
// largest symbol rate that fits a spectral emission mask.
//
// For i.i.d. symbols the PSD splits into a continuous part Var{S(zeta)} and a
// line spectrum |E{S(zeta)}|^2 at integer zeta, S being the Fourier
// transform of one symbol. Both moments are estimated per frequency from
// zero-padded transforms of oversampled random symbols.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gm/waveform.hpp"

namespace gm {

struct AlphaPolicy {
  enum class Kind { kFixed, kUniform } kind = Kind::kUniform;
  double alpha = 0.0;  // used by kFixed

  static AlphaPolicy fixed(double a) { return {Kind::kFixed, a}; }
  static AlphaPolicy uniform() { return {Kind::kUniform, 0.0}; }
};

struct RhoPolicy {
  enum class Kind { kConstant, kPsk } kind = Kind::kConstant;
  int order = 1;  // PSK order L

  static RhoPolicy constant() { return {Kind::kConstant, 1}; }
  static RhoPolicy psk(int L) { return {Kind::kPsk, L}; }
};

struct PsdOptions {
  int trials = 4096;
  std::uint64_t seed = 1;
  int zero_pad = 8;  // transform length = zero_pad * samples per symbol
};

struct SpectrumEstimate {
  int M = 0;
  int rate = 0;      // samples per symbol
  int zero_pad = 0;  // frequency samples per unit of zeta
  int trials = 0;

  // Fine grid, zeta_k = k / zero_pad for k covering [-rate/2, rate/2).
  std::vector<double> bin_freqs;
  std::vector<double> p_cont;     // continuous PSD (power per unit zeta)
  std::vector<double> p_cont_se;  // standard error of p_cont

  // Integer grid j = -rate/2 .. rate/2 - 1.
  std::vector<int> line_freqs;
  std::vector<double> p_disc;       // line power at zeta = j
  std::vector<double> p_binned;     // power in (j - 1/2, j + 1/2], lines included
  std::vector<double> p_binned_se;  // standard error of p_binned

  double mean_energy = 0.0;  // average symbol energy over trials
  double total_power = 0.0;  // sum of p_binned
  double oow = 0.0;          // fraction of power outside [-M/2, M/2)
};

// Monte Carlo PSD. Symbols are drawn uniformly from the (alpha, beta, rho)
// product set using stratified blocks: each consecutive block of |set|
// trials visits every combination once in random order.
// Requires trials >= 1 and cfg.oversample() >= 4.
SpectrumEstimate estimate_psd(const GmConfig& cfg, const AlphaPolicy& alpha_policy,
                              const PsdOptions& opts, const RhoPolicy& rho_policy = RhoPolicy::constant());

// Same estimator with an explicit rho policy. PSK requires a zero-mean
// constellation.
SpectrumEstimate psd_with_rho(const GmConfig& cfg, const AlphaPolicy& alpha_policy,
                              const RhoPolicy& rho_policy, const PsdOptions& opts);

// Power outside [-M/2, M/2) over total power.
double oow(const SpectrumEstimate& spec, int M);

// Piecewise-linear (in dB) limit on power spectral density relative to the
// total signal power, in dB/Hz, as a function of frequency offset in Hz.
// When every offset is >= 0 the mask applies to |f|; otherwise it is read as
// two-sided. Outside the listed range the nearest end value holds.
class EmissionMask {
 public:
  explicit EmissionMask(std::vector<std::pair<double, double>> points);

  // Two-column text: "<offset_hz> <limit_db>" per line, '#' comments.
  static EmissionMask parse(const std::string& text);
  static EmissionMask load(const std::filesystem::path& path);

  double limit_db(double f_hz) const;
  // Smallest limit over [f1, f2].
  double min_limit_db(double f1_hz, double f2_hz) const;
  double max_offset_hz() const;
  EmissionMask relaxed(double delta_db) const;
  bool symmetric() const { return symmetric_; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  std::vector<std::pair<double, double>> points_;
  bool symmetric_;
};

struct SymbolRate {
  double w_sym = 0.0;  // symbols per second
  double r_b = 0.0;    // bits per second
};

// Whether the binned spectrum scaled to symbol rate w_sym satisfies the mask.
bool mask_satisfied(const SpectrumEstimate& spec, const EmissionMask& mask, double w_sym);

// Largest w_sym meeting the mask (0.1% relative precision) and r_b =
// ell_sym * w_sym. Throws InfeasibleError when no rate in the search range
// complies.
SymbolRate max_symbol_rate(const SpectrumEstimate& spec, int ell_sym, const EmissionMask& mask);

SymbolRate max_symbol_rate(const GmConfig& cfg, const EmissionMask& mask,
                           const AlphaPolicy& alpha_policy, const PsdOptions& opts,
                           const RhoPolicy& rho_policy = RhoPolicy::constant());

}  // namespace gm
