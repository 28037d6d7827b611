#pragma once

// Preamble detection under carrier frequency error. A chirp preamble
// exp(j pi (a t^2 + 2 b t)) offset in frequency by d is a time-shifted copy
// of itself (shift -d/a), so a single matched filter with a lag search
// recovers nearly all of its energy. A tone preamble (a = 0) only gets
// the sinc(d) fraction.

#include <vector>

#include "gm/waveform.hpp"

namespace gm {

struct PreambleSpec {
  double alpha = 0.0;    // normalized spread rate (symbol-rate^2 units)
  double b = 0.0;        // normalized start frequency offset
  int repetitions = 8;   // repeated symbols in the burst
  int rate = 1024;       // samples per symbol

  static PreambleSpec chirp(double alpha, double b, int rate, int repetitions = 8);
  static PreambleSpec tone(double b, int rate, int repetitions = 8);
};

// One preamble symbol and the repeated burst.
SampledWaveform preamble_symbol(const PreambleSpec& spec);
SampledWaveform preamble_burst(const PreambleSpec& spec);

// Multiplies by exp(j 2 pi offset t), t in symbols from the first sample.
SampledWaveform apply_frequency_offset(const SampledWaveform& w, double offset);

struct PreambleDetection {
  long best_lag = 0;         // samples, relative to the nominal start
  double best_freq = 0.0;    // frequency hypothesis at the peak
  double best_magnitude = 0.0;
  std::vector<long> lags;
  std::vector<double> freqs;
  std::vector<double> surface;  // |lambda|, lags.size() x freqs.size(), row-major
};

// Normalized correlation of the window rx[start + lag, start + lag + rate)
// (derotated by each frequency hypothesis) against one preamble symbol,
// divided by sqrt(E_template * E_window). Throws ConfigError on empty grids
// or windows outside rx.
PreambleDetection detect_preamble(const SampledWaveform& rx, const PreambleSpec& spec,
                                  const std::vector<double>& freq_grid,
                                  const std::vector<long>& lag_grid, long nominal_start);

struct TolerancePoint {
  double offset = 0.0;
  double peak = 0.0;
  long best_lag = 0;
};

// Sweeps carrier offsets over a noiseless burst, with a 1-sample lag grid of
// +-rate/2 around the middle repetition and no frequency hypotheses.
std::vector<TolerancePoint> tolerance_curve(const PreambleSpec& spec, const std::vector<double>& offsets);

}  // namespace gm
