#include "gm/modem.hpp"

#include <cmath>
#include <numbers>

#include "gm/error.hpp"
#include "gm/fft.hpp"

namespace gm {

std::vector<SymbolDecision> map_bits(std::span<const std::uint8_t> bits, const GmConfig& cfg) {
  if (bits.empty()) throw ConfigError("no bits to map");
  const int ell = cfg.ell_sym();
  const std::size_t groups = (bits.size() + static_cast<std::size_t>(ell) - 1) / static_cast<std::size_t>(ell);
  std::vector<SymbolDecision> out;
  out.reserve(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    unsigned value = 0;
    for (int k = 0; k < ell; ++k) {
      const std::size_t pos = g * static_cast<std::size_t>(ell) + static_cast<std::size_t>(k);
      const std::uint8_t b = pos < bits.size() ? bits[pos] : 0;
      if (b > 1) throw ConfigError("bit values must be 0 or 1");
      value = (value << 1) | b;
    }
    SymbolDecision d;
    d.alpha_index = static_cast<int>(value >> cfg.m());
    d.beta = static_cast<int>(value & ((1u << cfg.m()) - 1u));
    out.push_back(d);
  }
  return out;
}

std::vector<std::uint8_t> demap(std::span<const SymbolDecision> decisions, const GmConfig& cfg) {
  std::vector<std::uint8_t> bits;
  bits.reserve(decisions.size() * static_cast<std::size_t>(cfg.ell_sym()));
  for (const auto& d : decisions) {
    if (d.alpha_index < 0 || d.alpha_index >= cfg.num_alpha() || d.beta < 0 || d.beta >= cfg.M()) {
      throw ConfigError("symbol decision out of range");
    }
    const unsigned value = (static_cast<unsigned>(d.alpha_index) << cfg.m()) | static_cast<unsigned>(d.beta);
    for (int k = cfg.ell_sym() - 1; k >= 0; --k) bits.push_back(static_cast<std::uint8_t>((value >> k) & 1u));
  }
  return bits;
}

GmSymbolParams to_params(const SymbolDecision& d, const GmConfig& cfg) {
  if (d.alpha_index < 0 || d.alpha_index >= cfg.num_alpha() || d.beta < 0 || d.beta >= cfg.M()) {
    throw ConfigError("symbol decision out of range");
  }
  return {cfg.alpha_set()[static_cast<std::size_t>(d.alpha_index)], static_cast<double>(d.beta), 1.0};
}

SampledWaveform transmit(std::span<const SymbolDecision> symbols, const GmConfig& cfg) {
  if (symbols.empty()) throw ConfigError("nothing to transmit");
  SampledWaveform out;
  out.rate = cfg.rate();
  out.samples.reserve(symbols.size() * static_cast<std::size_t>(cfg.rate()));
  for (const auto& s : symbols) {
    const auto w = synthesize(to_params(s, cfg), cfg);
    out.samples.insert(out.samples.end(), w.samples.begin(), w.samples.end());
  }
  return out;
}

SampledWaveform lowpass(const SampledWaveform& w, int M) {
  if (M < 1 || w.rate % M != 0) throw ConfigError("waveform rate must be a multiple of M");
  if (w.rate == M) return w;
  const auto R = static_cast<std::size_t>(w.rate);
  const auto Mu = static_cast<std::size_t>(M);
  const std::size_t blocks = (w.size() + R - 1) / R;
  SampledWaveform out;
  out.rate = M;
  out.samples.reserve(blocks * Mu);
  std::vector<cplx> block(R);
  std::vector<cplx> band(Mu);
  const double scale = 1.0 / static_cast<double>(R);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::fill(block.begin(), block.end(), cplx{0.0, 0.0});
    const std::size_t start = b * R;
    const std::size_t count = std::min(R, w.size() - start);
    std::copy_n(w.samples.begin() + static_cast<std::ptrdiff_t>(start), count, block.begin());
    const auto X = fft(block);
    // Frequencies -M/2 .. M/2-1 in M-point DFT order.
    for (std::size_t k = 0; k < Mu / 2; ++k) band[k] = X[k];
    for (std::size_t k = Mu / 2; k < Mu; ++k) band[k] = X[R - Mu + k];
    if (Mu == 1) band[0] = X[0];
    const auto y = ifft(band);
    for (const auto& v : y) out.samples.push_back(v * scale);
  }
  return out;
}

std::vector<cplx> reference_chirp(double alpha, int M) {
  std::vector<cplx> ref(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    const double x = alpha * (static_cast<double>(i) / M) * (static_cast<double>(i) / M) - i;
    const double r = x - 2.0 * std::floor(x / 2.0);
    ref[static_cast<std::size_t>(i)] = std::polar(1.0, std::numbers::pi * r);
  }
  return ref;
}

std::vector<cplx> dechirp(std::span<const cplx> samples, double alpha_branch, int M) {
  if (samples.size() != static_cast<std::size_t>(M)) {
    throw ConfigError("dechirp expects exactly M samples");
  }
  const auto ref = reference_chirp(alpha_branch, M);
  std::vector<cplx> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i] * std::conj(ref[i]);
  return out;
}

Detector::Detector(const GmConfig& cfg) : M_(cfg.M()) {
  for (double a : cfg.alpha_set()) {
    auto ref = reference_chirp(a, M_);
    for (auto& v : ref) v = std::conj(v);
    conj_refs_.push_back(std::move(ref));
  }
}

Detection Detector::detect(std::span<const cplx> samples) const {
  if (samples.size() != static_cast<std::size_t>(M_)) {
    throw ConfigError("detector expects exactly M samples");
  }
  const int cols = static_cast<int>(conj_refs_.size());
  Detection det{DetectionMatrix(M_, cols), {}};
  std::vector<cplx> theta(static_cast<std::size_t>(M_));
  for (int a = 0; a < cols; ++a) {
    const auto& ref = conj_refs_[static_cast<std::size_t>(a)];
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = samples[i] * ref[i];
    const auto D = fft(theta);
    for (int b = 0; b < M_; ++b) det.scores.at(b, a) = std::abs(D[static_cast<std::size_t>(b)]);
  }
  double best = -1.0;
  for (int b = 0; b < M_; ++b) {
    for (int a = 0; a < cols; ++a) {
      const double v = det.scores.at(b, a);
      if (v > best) {
        best = v;
        det.decision = {a, b};
      }
    }
  }
  return det;
}

std::vector<SymbolDecision> Detector::demodulate(const SampledWaveform& chip_rate) const {
  if (chip_rate.rate != M_) throw ConfigError("demodulation expects one sample per chip");
  const auto Mu = static_cast<std::size_t>(M_);
  std::vector<SymbolDecision> out;
  for (std::size_t start = 0; start + Mu <= chip_rate.size(); start += Mu) {
    out.push_back(detect(std::span<const cplx>(chip_rate.samples).subspan(start, Mu)).decision);
  }
  return out;
}

Detection detect(std::span<const cplx> samples, const GmConfig& cfg) {
  return Detector(cfg).detect(samples);
}

}  // namespace gm
