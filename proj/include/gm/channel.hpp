#pragma once

// Propagation channels: AWGN calibrated to Eb/N0, frequency-flat Rayleigh
// fading and tap-spaced frequency-selective multipath with an exponential
// power-delay profile. All draws are pure functions of (seed, params).

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gm/waveform.hpp"

namespace gm {

struct Tap {
  cplx gain{1.0, 0.0};
  double delay_chips = 0.0;
  double power = 1.0;  // mean power sigma_i^2 of this tap in the profile
};

struct ChannelRealization {
  std::vector<Tap> taps;
  double rms_delay_spread_chips = 0.0;  // of the power profile

  // Throws ConfigError unless the profile powers sum to one.
  void check_normalized(double tol = 1e-9) const;
};

// Single tap, unit gain, zero delay.
ChannelRealization identity_channel();

// Rms delay spread of a (power, delay) profile.
double rms_delay_spread(const std::vector<Tap>& taps);

struct NoiseSpec {
  double eb_n0_db = 0.0;
  int ell_sym = 1;  // bits per symbol; Es = ell_sym * Eb
};

// Per-sample complex noise variance for unit-magnitude samples at `rate`
// samples per symbol: rate / (ell_sym * 10^(eb_n0_db/10)).
double noise_variance(const NoiseSpec& spec, int rate);

// Adds circularly-symmetric complex Gaussian noise. An infinite Eb/N0 returns
// the input unchanged.
SampledWaveform awgn(const SampledWaveform& w, const NoiseSpec& spec, std::uint64_t seed);

// Rayleigh: one tap at zero delay with CN(0, 1) gain.
ChannelRealization draw_flat(std::uint64_t seed);

// Taps at integer chip delays 0..n_taps-1 with powers proportional to
// exp(-delay / rms_spread_chips), normalized to one; CN(0, sigma_i^2) gains.
ChannelRealization draw_selective(int n_taps, double rms_spread_chips, std::uint64_t seed);

// Delayed, weighted sum of the input. `M` gives the chip rate (rate / M
// samples per chip); delays are rounded to the sample grid. The output is
// longer than the input by the largest delay.
SampledWaveform apply(const SampledWaveform& w, const ChannelRealization& ch, int M);

// Channel presets: "awgn", "flat", "selective(n_taps, rms)".
struct ChannelPreset {
  enum class Kind { kAwgn, kFlat, kSelective } kind = Kind::kAwgn;
  int n_taps = 1;
  double rms_spread_chips = 0.0;

  static ChannelPreset parse(std::string_view text);
  std::string label() const;
  ChannelRealization draw(std::uint64_t seed) const;
};

// Deterministic seed splitting: stream `index` of `master` (SplitMix64 of
// master + golden-ratio increments).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace gm
