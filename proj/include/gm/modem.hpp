#pragma once

// Bit mapping, burst modulation and the dechirp + M-point DFT detector,
// repeated once per alpha branch for joint alpha/beta shift keying.

#include <cstdint>
#include <span>
#include <vector>

#include "gm/waveform.hpp"

namespace gm {

// One detected or transmitted symbol in index form.
struct SymbolDecision {
  int alpha_index = 0;
  int beta = 0;

  friend bool operator==(const SymbolDecision&, const SymbolDecision&) = default;
};

// M rows (beta) by N columns (alpha branch) of DFT magnitudes, row-major.
class DetectionMatrix {
 public:
  DetectionMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& at(int beta, int alpha_index) { return data_[static_cast<std::size_t>(beta * cols_ + alpha_index)]; }
  double at(int beta, int alpha_index) const {
    return data_[static_cast<std::size_t>(beta * cols_ + alpha_index)];
  }

 private:
  int rows_;
  int cols_;
  std::vector<double> data_;
};

struct Detection {
  DetectionMatrix scores;
  SymbolDecision decision;
};

// Splits bits (values 0/1) into ell_sym groups: the first n bits (MSB first)
// index the sorted alpha set, the remaining m bits are beta. The final group
// is zero-padded. Throws ConfigError on empty input or non-binary values.
std::vector<SymbolDecision> map_bits(std::span<const std::uint8_t> bits, const GmConfig& cfg);

// Inverse of map_bits; returns ell_sym bits per decision.
std::vector<std::uint8_t> demap(std::span<const SymbolDecision> decisions, const GmConfig& cfg);

GmSymbolParams to_params(const SymbolDecision& d, const GmConfig& cfg);

// Concatenated symbol waveforms at cfg.rate() samples per symbol. Throws
// ConfigError on an empty list.
SampledWaveform transmit(std::span<const SymbolDecision> symbols, const GmConfig& cfg);

// Receiver front end: ideal brick-wall retention of [-M/2, M/2) applied per
// symbol-length block, then decimation to one sample per chip. A trailing
// partial block is zero-padded. Identity when the rate already equals M.
SampledWaveform lowpass(const SampledWaveform& w, int M);

// Chip-rate beta = 0 reference exp(j pi (alpha (i/M)^2 - i)), i = 0..M-1.
std::vector<cplx> reference_chirp(double alpha, int M);

// Elementwise product with the conjugate reference for `alpha_branch`.
// Throws ConfigError unless samples.size() == M.
std::vector<cplx> dechirp(std::span<const cplx> samples, double alpha_branch, int M);

// Detection with precomputed conjugate references, one per alpha branch.
class Detector {
 public:
  explicit Detector(const GmConfig& cfg);

  // One synchronized symbol of M chip-rate samples. Decision is the global
  // maximum, ties resolved towards the lowest beta, then lowest alpha index.
  Detection detect(std::span<const cplx> samples) const;

  // Decisions for consecutive M-sample windows of a chip-rate waveform.
  std::vector<SymbolDecision> demodulate(const SampledWaveform& chip_rate) const;

 private:
  int M_;
  std::vector<std::vector<cplx>> conj_refs_;
};

Detection detect(std::span<const cplx> samples, const GmConfig& cfg);

}  // namespace gm
