#pragma once

// Generalized chirp modulation (GM) symbol synthesis.
//
// Time is normalized to the symbol duration and frequency to the symbol rate.
// A symbol is described by its frequency-spread factor alpha (chirp rate),
// its frequency shift beta and a complex gain rho. The instantaneous
// frequency offset is confined to the nominal band [-M/2, M/2) by wrapping:
//
//   dv(t) = (alpha*t + beta) mod M - M/2
//
// and the phase is pi*(alpha*t^2 + (2*beta - M)*t + gamma(t)), where gamma
// collects the linear corrections introduced at each wrap instant.

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gm {

using cplx = std::complex<double>;

struct GmSymbolParams {
  double alpha = 0.0;
  double beta = 0.0;
  cplx rho{1.0, 0.0};
};

// Complex baseband samples; `rate` is samples per symbol duration.
struct SampledWaveform {
  std::vector<cplx> samples;
  int rate = 1;

  std::size_t size() const { return samples.size(); }
  double energy() const;  // sum |x|^2 / rate
};

// Full mGM alpha alphabet {0} U {+-M/2^i | i = 0..m-1}, restricted to even
// values, sorted ascending. Throws ConfigError unless M is a power of two >= 2.
std::vector<double> alphabet_alpha(int M);

bool is_power_of_two(long long v);
int log2_exact(long long v);  // throws ConfigError when v is not a power of two

struct PayloadBits {
  int m = 0;        // bits on the beta dimension
  int n = 0;        // bits on the alpha dimension
  int ell_sym = 0;  // m + n
};

// Throws ConfigError when alpha_set is not a subset of alphabet_alpha(M) or
// its size is not a power of two.
PayloadBits payload_bits(int M, std::span<const double> alpha_set);

// How the 2^n-member alpha sub-alphabet is picked from the full alphabet.
enum class AlphaSelection {
  kSmallestMagnitude,  // 2^n smallest |alpha|, negative before positive
  kLargestMagnitude,   // 2^n largest |alpha|, positive before negative
  kAntipodalFull,      // {-M, +M}
};

// Sub-alphabet with 2^n members (n = floor(log2 |A|) when `bits` < 0),
// sorted ascending.
std::vector<double> select_alpha_subset(int M, AlphaSelection policy, int bits = -1);

// Named policies: "zero", "smallest", "largest", "antipodal". Throws
// ConfigError for any other name.
std::vector<double> alpha_set_for_policy(int M, const std::string& policy, int bits = -1);

// Static modulation parameters shared by a transmitter/receiver pair.
class GmConfig {
 public:
  GmConfig(int M, std::vector<double> alpha_set, int oversample = 1);

  // Beta-only configuration with a fixed alpha.
  static GmConfig fixed_alpha(int M, double alpha, int oversample = 1);

  int M() const { return M_; }
  int m() const { return bits_.m; }
  int n() const { return bits_.n; }
  int ell_sym() const { return bits_.ell_sym; }
  int oversample() const { return oversample_; }
  int rate() const { return M_ * oversample_; }
  int num_alpha() const { return static_cast<int>(alpha_set_.size()); }
  const std::vector<double>& alpha_set() const { return alpha_set_; }

  // Position of `alpha` in alpha_set, or -1.
  int alpha_index(double alpha) const;

 private:
  int M_;
  std::vector<double> alpha_set_;
  int oversample_;
  PayloadBits bits_;
};

// Instantaneous frequency offset in symbol-rate units, in [-M/2, M/2).
double inst_frequency(const GmSymbolParams& p, int M, double t);

// Wrap instants of the frequency law within [0, 1). Empty for alpha == 0.
std::vector<double> wrap_breakpoints(const GmSymbolParams& p, int M);

// gamma(t) correction term (in units of pi radians).
double wrap_correction(const GmSymbolParams& p, int M, double t);

// Phase in units of pi radians, without reduction. t = 1 is the left limit.
double symbol_phase_halfcycles(const GmSymbolParams& p, int M, double t);

// Phase in radians, pi*(alpha t^2 + (2 beta - M) t + gamma(t)).
double symbol_phase(const GmSymbolParams& p, int M, double t);

// Bandwidth-constrained symbol sampled at M*oversample samples per symbol.
SampledWaveform synthesize(const GmSymbolParams& p, int M, int oversample);
SampledWaveform synthesize(const GmSymbolParams& p, const GmConfig& cfg);

// Unconstrained canonical waveform rho*exp(j*pi*(alpha t^2 + 2 beta t)).
SampledWaveform synthesize_canonical(const GmSymbolParams& p, int rate);

enum class SpecialCase { kQam, kFsk, kLoRa, kFqam, kPskLoRa };

SpecialCase parse_special_case(std::string_view name);

// The full symbol set of a legacy scheme expressed as GM parameters.
// QAM/FQAM/PSK-LoRa draw rho from `constellation`; FSK and LoRa ignore it.
std::vector<GmSymbolParams> special_case_symbols(SpecialCase kind, int M,
                                                 std::span<const cplx> constellation = {});

// Unit-energy L-PSK constellation exp(j*2*pi*k/L), k = 0..L-1.
std::vector<cplx> psk_constellation(int L);

}  // namespace gm
