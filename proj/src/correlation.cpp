#include "gm/correlation.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "gm/error.hpp"

namespace gm {

namespace {

constexpr double kPi = std::numbers::pi;

double integrate_adaptive(auto f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13, &err);
}

}  // namespace

cplx fresnel(double x) {
  const double sign = x < 0 ? -1.0 : 1.0;
  const double ax = std::abs(x);
  // Unit sub-intervals keep the number of oscillations per panel bounded.
  double c = 0.0, s = 0.0;
  for (double a = 0.0; a < ax; a += 1.0) {
    const double b = std::min(ax, a + 1.0);
    c += integrate_adaptive([](double v) { return std::cos(kPi * v * v / 2.0); }, a, b);
    s += integrate_adaptive([](double v) { return std::sin(kPi * v * v / 2.0); }, a, b);
  }
  return {sign * c, sign * s};
}

double xcorr_beta(double delta_beta) {
  if (delta_beta == 0.0) return 1.0;
  const double x = kPi * delta_beta;
  return std::abs(std::sin(x)) / std::abs(x);
}

double xcorr_alpha(double delta_alpha) {
  if (delta_alpha == 0.0) return 1.0;
  const double x = std::sqrt(2.0 * std::abs(delta_alpha));
  return std::abs(fresnel(x)) / x;
}

CorrelationResult xcorr_sampled(const SampledWaveform& w1, const SampledWaveform& w2, long lag,
                                double freq_offset) {
  if (w1.rate != w2.rate) throw ConfigError("correlation of waveforms with different rates");
  const long n1 = static_cast<long>(w1.size());
  const long n2 = static_cast<long>(w2.size());
  if (std::abs(lag) >= std::max(n1, n2)) throw ConfigError("correlation lag exceeds waveform");

  double e1 = 0.0, e2 = 0.0;
  for (const auto& x : w1.samples) e1 += std::norm(x);
  for (const auto& x : w2.samples) e2 += std::norm(x);

  cplx acc{0.0, 0.0};
  const long lo = std::max(0L, lag);
  const long hi = std::min(n1, n2 + lag);
  const double step = 2.0 * kPi * freq_offset / w1.rate;
  for (long n = lo; n < hi; ++n) {
    const cplx rot = freq_offset == 0.0 ? cplx{1.0, 0.0} : std::polar(1.0, step * n);
    acc += w1.samples[static_cast<std::size_t>(n)] * rot *
           std::conj(w2.samples[static_cast<std::size_t>(n - lag)]);
  }
  CorrelationResult r;
  r.normalization = std::sqrt(e1 * e2);
  r.value = r.normalization > 0 ? acc / r.normalization : cplx{0.0, 0.0};
  r.magnitude = std::abs(r.value);
  return r;
}

double beta_orthogonality_bound(int M, double alpha) {
  if (alpha == 0.0) throw ConfigError("beta orthogonality bound is undefined for alpha = 0");
  const double ratio = M / std::abs(alpha);
  return ratio / (std::sqrt(2.0 * M) * std::sqrt(ratio) - 1.0);
}

double alpha_xcorr_bound(double delta_alpha) {
  if (delta_alpha == 0.0) throw ConfigError("alpha correlation bound is undefined at zero offset");
  return 3.0 * std::sqrt(2.0) / std::sqrt(std::abs(delta_alpha));
}

double autocorr_delay(const GmSymbolParams& p, int M, double tau_chips) {
  if (tau_chips < 0.0 || tau_chips >= M) throw ConfigError("delay must lie in [0, M) chips");
  if (tau_chips == 0.0) return 1.0;
  const double tau = tau_chips / M;

  std::vector<double> cuts{tau, 1.0};
  for (double tq : wrap_breakpoints(p, M)) {
    if (tq > tau && tq < 1.0) cuts.push_back(tq);
    if (tq + tau > tau && tq + tau < 1.0) cuts.push_back(tq + tau);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Phase difference in half-cycles; continuous, linear between cuts.
  auto diff = [&](double v) {
    return symbol_phase_halfcycles(p, M, v) - symbol_phase_halfcycles(p, M, v - tau);
  };

  cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    const double len = b - a;
    if (len <= 0.0) continue;
    const double da = diff(a);
    const double slope = (diff(b) - da) / len;
    const cplx start = std::polar(1.0, kPi * std::fmod(da, 2.0));
    const double theta = kPi * slope * len;
    cplx seg;
    if (std::abs(theta) < 1e-9) {
      seg = len * cplx{1.0, 0.5 * theta};
    } else {
      seg = (std::polar(1.0, theta) - 1.0) / cplx{0.0, kPi * slope};
    }
    acc += start * seg;
  }
  return std::abs(acc) / (1.0 - tau);
}

double leakage_variance(const GmSymbolParams& p, int M, const ChannelRealization& ch) {
  ch.check_normalized();
  double acc = 0.0;
  for (std::size_t i = 0; i < ch.taps.size(); ++i) {
    for (std::size_t j = 0; j < ch.taps.size(); ++j) {
      if (i == j) continue;
      const double dt = std::abs(ch.taps[j].delay_chips - ch.taps[i].delay_chips);
      const double lam = autocorr_delay(p, M, dt);
      acc += lam * lam * ch.taps[i].power * ch.taps[j].power;
    }
  }
  return acc;
}

}  // namespace gm
