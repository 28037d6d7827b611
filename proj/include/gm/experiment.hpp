#pragma once

// Monte Carlo SER/BER campaigns, efficiency metrics and the Shannon-Hartley
// reference curve.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gm/channel.hpp"
#include "gm/modem.hpp"
#include "gm/waveform.hpp"

namespace gm {

struct ShannonPoint {
  double linear = 0.0;
  double db = 0.0;
};

// Minimum Eb/N0 at eta degrees of freedom per bit: eta * (2^(1/eta) - 1).
ShannonPoint shannon_bound(double eta);

struct ResourceEfficiency {
  double u = 0.0;    // bits per degree of freedom
  double eta = 0.0;  // degrees of freedom per bit
};

// u = ell_sym / w_pass_dof. Throws ConfigError when w_pass_dof < M.
ResourceEfficiency resource_efficiency(const GmConfig& cfg, double w_pass_dof);

// Two-sided Wilson score interval for k successes out of n.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
Interval wilson_interval(long long k, long long n, double z = 1.959963984540054);

// Analysis receiver with a known channel realization: one filter per
// candidate matched to the channel-distorted symbol h * s (truncated to the
// symbol window), score |<y, h * s>| / ||h * s||. Computed as delayed
// dechirp + DFT fingers combined with the conjugate tap gains. With a single
// zero-delay tap it makes the same decisions as Detector.
class ChannelMatchedDetector {
 public:
  ChannelMatchedDetector(const GmConfig& cfg, const ChannelRealization& ch);

  // Symbol starting at chip `start` of a chip-rate waveform; samples past
  // the end count as zero.
  Detection detect(std::span<const cplx> chips, std::size_t start) const;

 private:
  int M_;
  std::vector<int> delays_;
  std::vector<cplx> gains_;
  std::vector<std::vector<cplx>> conj_refs_;
  std::vector<std::vector<double>> inv_norm_;  // per branch, per beta
};

enum class Receiver { kDft, kChannelMatched };

Receiver parse_receiver(const std::string& name);
std::string receiver_name(Receiver r);

struct ModemSetup {
  std::string label;
  int M = 8;
  std::vector<double> alpha_set{0.0};
  int oversample = 1;
  // Empty when alpha_set is explicit; otherwise a named policy or "default",
  // which is antipodal on selective channels and smallest elsewhere.
  std::string alpha_policy;

  ModemSetup for_channel(const ChannelPreset& ch) const;
  GmConfig config() const;
};

struct ExperimentConfig {
  ModemSetup modem;
  ChannelPreset channel;
  std::vector<double> eb_n0_db;  // +inf allowed (noiseless)
  long long min_errors = 200;
  long long max_symbols = 10'000'000;
  int burst_symbols = 32;
  std::uint64_t seed = 1;
  Receiver receiver = Receiver::kDft;
  std::string out;

  // Throws ConfigError on empty grids, non-positive stopping rules or an
  // invalid modem; InfeasibleError when max_symbols cannot hold one burst.
  void validate() const;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct SerPoint {
  double eb_n0_db = 0.0;
  long long symbols = 0;
  long long symbol_errors = 0;
  long long bit_errors = 0;
  double ser = 0.0;
  double ber = 0.0;
  Interval ser_ci;
  Interval ber_ci;
};

struct SerCurve {
  std::string label;
  std::string channel;
  int ell_sym = 0;
  std::vector<SerPoint> points;
};

// Per Eb/N0 point, bursts of random symbols go through modulation, one
// channel realization per burst, the lowpass front end, AWGN and detection
// until min_errors symbol errors or max_symbols symbols. The front end is
// an ideal brick wall, so the noise is drawn after it at one sample per
// chip with the equivalent variance N0 * M.
// Burst b at grid point p uses derive_seed(derive_seed(seed, p), b) for
// its payload, channel and noise streams, independent of the modem, so
// different setups see common random numbers.
SerCurve run_ser_campaign(const ExperimentConfig& exp);

struct EfficiencyPoint {
  std::string label;
  std::string channel;
  double eta = 0.0;
  double u = 0.0;
  double eps_db = 0.0;        // required Eb/N0 at the target
  double achieved_ser = 0.0;  // first grid SER at or below target
  double shannon_db = 0.0;    // bound at the same eta
};

// Required Eb/N0 for `target` by linear interpolation of log10(SER) over
// the first bracketing pair of grid points. Zero-error points use
// 0.5/symbols. Throws InfeasibleError when the target is not bracketed.
double required_eb_n0(const SerCurve& curve, double target);

struct SweepConfig {
  std::vector<ModemSetup> modems;
  std::vector<ChannelPreset> channels;
  std::vector<double> eb_n0_db;
  long long min_errors = 200;
  long long max_symbols = 10'000'000;
  int burst_symbols = 32;
  std::uint64_t seed = 1;
  double target_ser = 1e-2;
  double w_pass_factor = 1.0;  // w_pass = factor * M
  Receiver receiver = Receiver::kDft;
  std::string out;

  void validate() const;
  static SweepConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct SweepResult {
  std::vector<SerCurve> curves;
  std::vector<EfficiencyPoint> points;
};

SweepResult efficiency_sweep(const SweepConfig& sweep);

// 64-bit FNV-1a, hex encoded, of the compact JSON dump.
std::string config_hash(const nlohmann::json& j);

}  // namespace gm
