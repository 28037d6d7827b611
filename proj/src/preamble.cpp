#include "gm/preamble.hpp"

#include <cmath>
#include <numbers>

#include "gm/error.hpp"

namespace gm {

PreambleSpec PreambleSpec::chirp(double alpha, double b, int rate, int repetitions) {
  if (alpha == 0.0) throw ConfigError("chirp preamble needs a nonzero spread rate");
  return {alpha, b, repetitions, rate};
}

PreambleSpec PreambleSpec::tone(double b, int rate, int repetitions) { return {0.0, b, repetitions, rate}; }

SampledWaveform preamble_symbol(const PreambleSpec& spec) {
  if (spec.rate < 1) throw ConfigError("preamble rate must be positive");
  return synthesize_canonical({spec.alpha, spec.b, 1.0}, spec.rate);
}

SampledWaveform preamble_burst(const PreambleSpec& spec) {
  if (spec.repetitions < 1) throw ConfigError("preamble needs at least one repetition");
  const auto sym = preamble_symbol(spec);
  SampledWaveform out;
  out.rate = spec.rate;
  for (int r = 0; r < spec.repetitions; ++r) {
    out.samples.insert(out.samples.end(), sym.samples.begin(), sym.samples.end());
  }
  return out;
}

SampledWaveform apply_frequency_offset(const SampledWaveform& w, double offset) {
  SampledWaveform out = w;
  for (std::size_t n = 0; n < out.size(); ++n) {
    // reduce the cycle count first to keep the argument small
    const double cycles = offset * static_cast<double>(n) / w.rate;
    const double frac = cycles - std::floor(cycles);
    out.samples[n] *= std::polar(1.0, 2.0 * std::numbers::pi * frac);
  }
  return out;
}

PreambleDetection detect_preamble(const SampledWaveform& rx, const PreambleSpec& spec,
                                  const std::vector<double>& freq_grid,
                                  const std::vector<long>& lag_grid, long nominal_start) {
  if (freq_grid.empty() || lag_grid.empty()) throw ConfigError("preamble search grids must be nonempty");
  if (rx.rate != spec.rate) throw ConfigError("received waveform rate differs from preamble rate");
  const auto tmpl = preamble_symbol(spec);
  const long L = static_cast<long>(tmpl.size());
  double e_tmpl = 0.0;
  for (const auto& x : tmpl.samples) e_tmpl += std::norm(x);

  // Derotated templates, one per frequency hypothesis.
  std::vector<std::vector<cplx>> refs;
  for (double f : freq_grid) {
    std::vector<cplx> r(static_cast<std::size_t>(L));
    for (long n = 0; n < L; ++n) {
      const double cycles = f * static_cast<double>(n) / spec.rate;
      r[static_cast<std::size_t>(n)] =
          std::conj(tmpl.samples[static_cast<std::size_t>(n)]) *
          std::polar(1.0, -2.0 * std::numbers::pi * (cycles - std::floor(cycles)));
    }
    refs.push_back(std::move(r));
  }

  PreambleDetection det;
  det.lags = lag_grid;
  det.freqs = freq_grid;
  det.surface.assign(lag_grid.size() * freq_grid.size(), 0.0);
  det.best_magnitude = -1.0;
  for (std::size_t li = 0; li < lag_grid.size(); ++li) {
    const long start = nominal_start + lag_grid[li];
    if (start < 0 || start + L > static_cast<long>(rx.size())) {
      throw ConfigError("preamble search window falls outside the received waveform");
    }
    double e_win = 0.0;
    for (long n = 0; n < L; ++n) e_win += std::norm(rx.samples[static_cast<std::size_t>(start + n)]);
    const double norm = std::sqrt(e_tmpl * e_win);
    for (std::size_t fi = 0; fi < freq_grid.size(); ++fi) {
      const auto& r = refs[fi];
      cplx acc{0.0, 0.0};
      for (long n = 0; n < L; ++n) {
        acc += rx.samples[static_cast<std::size_t>(start + n)] * r[static_cast<std::size_t>(n)];
      }
      const double mag = norm > 0.0 ? std::abs(acc) / norm : 0.0;
      det.surface[li * freq_grid.size() + fi] = mag;
      if (mag > det.best_magnitude) {
        det.best_magnitude = mag;
        det.best_lag = lag_grid[li];
        det.best_freq = freq_grid[fi];
      }
    }
  }
  return det;
}

std::vector<TolerancePoint> tolerance_curve(const PreambleSpec& spec, const std::vector<double>& offsets) {
  if (spec.repetitions < 3) throw ConfigError("tolerance sweep needs at least three repetitions");
  const auto burst = preamble_burst(spec);
  const long start = static_cast<long>(spec.repetitions / 2) * spec.rate;
  std::vector<long> lags;
  for (long l = -spec.rate / 2; l <= spec.rate / 2; ++l) lags.push_back(l);
  std::vector<TolerancePoint> out;
  for (double d : offsets) {
    const auto rx = apply_frequency_offset(burst, d);
    const auto det = detect_preamble(rx, spec, {0.0}, lags, start);
    out.push_back({d, det.best_magnitude, det.best_lag});
  }
  return out;
}

}  // namespace gm
