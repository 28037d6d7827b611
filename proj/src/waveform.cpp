#include "gm/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gm/error.hpp"

namespace gm {

double SampledWaveform::energy() const {
  double e = 0.0;
  for (const auto& x : samples) e += std::norm(x);
  return e / static_cast<double>(rate);
}

bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_exact(long long v) {
  if (!is_power_of_two(v)) {
    throw ConfigError("value " + std::to_string(v) + " is not a power of two");
  }
  int k = 0;
  while ((1LL << k) < v) ++k;
  return k;
}

std::vector<double> alphabet_alpha(int M) {
  if (M < 2 || !is_power_of_two(M)) {
    throw ConfigError("modulation order M must be a power of two >= 2, got " + std::to_string(M));
  }
  const int m = log2_exact(M);
  std::vector<double> out{0.0};
  for (int i = 0; i < m; ++i) {
    const int a = M >> i;
    if (a % 2 != 0) continue;  // continuous phase needs alpha = 2z
    out.push_back(static_cast<double>(a));
    out.push_back(-static_cast<double>(a));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

bool contains(std::span<const double> set, double v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

}  // namespace

PayloadBits payload_bits(int M, std::span<const double> alpha_set) {
  const auto full = alphabet_alpha(M);
  if (alpha_set.empty() || !is_power_of_two(static_cast<long long>(alpha_set.size()))) {
    throw ConfigError("alpha set size must be a power of two, got " +
                      std::to_string(alpha_set.size()));
  }
  for (std::size_t i = 0; i < alpha_set.size(); ++i) {
    if (!contains(full, alpha_set[i])) {
      std::ostringstream os;
      os << "alpha " << alpha_set[i] << " is not in the mGM alphabet for M=" << M;
      throw ConfigError(os.str());
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (alpha_set[j] == alpha_set[i]) throw ConfigError("alpha set has duplicate entries");
    }
  }
  PayloadBits b;
  b.m = log2_exact(M);
  b.n = log2_exact(static_cast<long long>(alpha_set.size()));
  b.ell_sym = b.m + b.n;
  return b;
}

std::vector<double> select_alpha_subset(int M, AlphaSelection policy, int bits) {
  auto full = alphabet_alpha(M);
  if (policy == AlphaSelection::kAntipodalFull) {
    return {-static_cast<double>(M), static_cast<double>(M)};
  }
  int max_bits = 0;
  while ((std::size_t{1} << (max_bits + 1)) <= full.size()) ++max_bits;
  if (bits < 0) bits = max_bits;
  if (bits > max_bits) {
    throw ConfigError("requested " + std::to_string(bits) + " alpha bits but at most " +
                      std::to_string(max_bits) + " are available for M=" + std::to_string(M));
  }
  if (policy == AlphaSelection::kSmallestMagnitude) {
    std::stable_sort(full.begin(), full.end(), [](double a, double b) {
      if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
      return a < b;
    });
  } else {
    std::stable_sort(full.begin(), full.end(), [](double a, double b) {
      if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
      return a > b;
    });
  }
  full.resize(std::size_t{1} << bits);
  std::sort(full.begin(), full.end());
  return full;
}

std::vector<double> alpha_set_for_policy(int M, const std::string& policy, int bits) {
  if (policy == "smallest") return select_alpha_subset(M, AlphaSelection::kSmallestMagnitude, bits);
  if (policy == "largest") return select_alpha_subset(M, AlphaSelection::kLargestMagnitude, bits);
  if (policy == "antipodal") return select_alpha_subset(M, AlphaSelection::kAntipodalFull, bits);
  if (policy == "zero") return {0.0};
  throw ConfigError("unknown alpha policy: " + policy);
}

GmConfig::GmConfig(int M, std::vector<double> alpha_set, int oversample)
    : M_(M), alpha_set_(std::move(alpha_set)), oversample_(oversample) {
  if (oversample_ < 1) throw ConfigError("oversample must be >= 1");
  std::sort(alpha_set_.begin(), alpha_set_.end());
  bits_ = payload_bits(M_, alpha_set_);
}

GmConfig GmConfig::fixed_alpha(int M, double alpha, int oversample) {
  return GmConfig(M, {alpha}, oversample);
}

int GmConfig::alpha_index(double alpha) const {
  auto it = std::find(alpha_set_.begin(), alpha_set_.end(), alpha);
  return it == alpha_set_.end() ? -1 : static_cast<int>(it - alpha_set_.begin());
}

double inst_frequency(const GmSymbolParams& p, int M, double t) {
  const double v = p.alpha * t + p.beta;
  const double w = v - M * std::floor(v / M);
  return w - M / 2.0;
}

std::vector<double> wrap_breakpoints(const GmSymbolParams& p, int M) {
  std::vector<double> out;
  if (p.alpha == 0.0) return out;
  const double a = std::abs(p.alpha);
  if (p.alpha > 0) {
    // upward crossings of k*M for k*M > beta
    for (double k = std::floor(p.beta / M) + 1;; k += 1) {
      const double t = (k * M - p.beta) / a;
      if (t >= 1.0) break;
      if (t >= 0.0) out.push_back(t);
    }
  } else {
    // downward crossings of k*M for k*M <= beta
    for (double k = std::floor(p.beta / M);; k -= 1) {
      const double t = (p.beta - k * M) / a;
      if (t >= 1.0) break;
      if (t >= 0.0) out.push_back(t);
    }
  }
  return out;
}

double wrap_correction(const GmSymbolParams& p, int M, double t) {
  if (p.alpha == 0.0) return 0.0;
  double acc = 0.0;
  for (double tq : wrap_breakpoints(p, M)) {
    if (t > tq) acc += t - tq;
  }
  const double sign = p.alpha > 0 ? 1.0 : -1.0;
  return -2.0 * M * sign * acc;
}

double symbol_phase_halfcycles(const GmSymbolParams& p, int M, double t) {
  return p.alpha * t * t + (2.0 * p.beta - M) * t + wrap_correction(p, M, t);
}

double symbol_phase(const GmSymbolParams& p, int M, double t) {
  return std::numbers::pi * symbol_phase_halfcycles(p, M, t);
}

namespace {

// exp(j*pi*x) with x reduced modulo 2 first so large phases keep precision.
cplx unit_phasor_halfcycles(double x) {
  const double r = x - 2.0 * std::floor(x / 2.0);
  return std::polar(1.0, std::numbers::pi * r);
}

}  // namespace

SampledWaveform synthesize(const GmSymbolParams& p, int M, int oversample) {
  if (oversample < 1) throw ConfigError("oversample must be >= 1");
  SampledWaveform w;
  w.rate = M * oversample;
  w.samples.resize(static_cast<std::size_t>(w.rate));
  const auto bps = wrap_breakpoints(p, M);
  const double sign = p.alpha > 0 ? 1.0 : -1.0;
  for (int i = 0; i < w.rate; ++i) {
    const double t = static_cast<double>(i) / w.rate;
    double gamma = 0.0;
    for (double tq : bps) {
      if (t > tq) gamma += t - tq;
    }
    gamma *= -2.0 * M * sign;
    const double x = p.alpha * t * t + (2.0 * p.beta - M) * t + gamma;
    w.samples[static_cast<std::size_t>(i)] = p.rho * unit_phasor_halfcycles(x);
  }
  return w;
}

SampledWaveform synthesize(const GmSymbolParams& p, const GmConfig& cfg) {
  return synthesize(p, cfg.M(), cfg.oversample());
}

SampledWaveform synthesize_canonical(const GmSymbolParams& p, int rate) {
  SampledWaveform w;
  w.rate = rate;
  w.samples.resize(static_cast<std::size_t>(rate));
  for (int i = 0; i < rate; ++i) {
    const double t = static_cast<double>(i) / rate;
    w.samples[static_cast<std::size_t>(i)] =
        p.rho * unit_phasor_halfcycles(p.alpha * t * t + 2.0 * p.beta * t);
  }
  return w;
}

SpecialCase parse_special_case(std::string_view name) {
  if (name == "QAM") return SpecialCase::kQam;
  if (name == "FSK") return SpecialCase::kFsk;
  if (name == "LoRa") return SpecialCase::kLoRa;
  if (name == "FQAM") return SpecialCase::kFqam;
  if (name == "PSK-LoRa") return SpecialCase::kPskLoRa;
  throw ConfigError("unknown modulation special case '" + std::string(name) + "'");
}

std::vector<GmSymbolParams> special_case_symbols(SpecialCase kind, int M,
                                                 std::span<const cplx> constellation) {
  if (M < 1) throw ConfigError("M must be positive");
  const double alpha_lora = static_cast<double>(M);
  std::vector<GmSymbolParams> out;
  auto need_constellation = [&] {
    if (constellation.empty()) throw ConfigError("special case requires a constellation");
  };
  switch (kind) {
    case SpecialCase::kQam:
      need_constellation();
      for (const auto& r : constellation) out.push_back({0.0, 0.0, r});
      break;
    case SpecialCase::kFsk:
      for (int b = 0; b < M; ++b) out.push_back({0.0, static_cast<double>(b), 1.0});
      break;
    case SpecialCase::kLoRa:
      for (int b = 0; b < M; ++b) out.push_back({alpha_lora, static_cast<double>(b), 1.0});
      break;
    case SpecialCase::kFqam:
      need_constellation();
      for (int b = 0; b < M; ++b)
        for (const auto& r : constellation) out.push_back({0.0, static_cast<double>(b), r});
      break;
    case SpecialCase::kPskLoRa:
      need_constellation();
      for (const auto& r : constellation) {
        if (std::abs(std::abs(r) - 1.0) > 1e-12) {
          throw ConfigError("PSK-LoRa requires a unit-magnitude constellation");
        }
      }
      for (int b = 0; b < M; ++b)
        for (const auto& r : constellation) out.push_back({alpha_lora, static_cast<double>(b), r});
      break;
  }
  return out;
}

std::vector<cplx> psk_constellation(int L) {
  if (L < 1) throw ConfigError("PSK order must be >= 1");
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k) out.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / L));
  return out;
}

}  // namespace gm
