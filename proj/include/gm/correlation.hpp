#pragma once

// Cross- and auto-correlation of GM symbols in the beta, alpha and delay
// dimensions, with the analytic bounds they are checked against.

#include <complex>

#include "gm/channel.hpp"
#include "gm/waveform.hpp"

namespace gm {

struct CorrelationResult {
  cplx value{0.0, 0.0};
  double magnitude = 0.0;
  double normalization = 0.0;  // energy the raw sum was divided by
};

// Complex Fresnel integral F(x) = C(x) + jS(x) = int_0^x exp(j pi v^2 / 2) dv,
// by adaptive Gauss-Kronrod quadrature (absolute tolerance ~1e-10).
cplx fresnel(double x);

// |sin(pi d)| / |pi d|, 1 at d = 0.
double xcorr_beta(double delta_beta);

// |F(sqrt(2|d|))| / sqrt(2|d|), 1 at d = 0. Applies to the unconstrained
// canonical waveform.
double xcorr_alpha(double delta_alpha);

// Energy-normalized correlation of w1 * exp(j 2 pi f t) against w2 delayed
// by `lag` samples, summed over the overlap and divided by sqrt(E1 E2).
// Throws ConfigError on rate mismatch or |lag| >= length.
CorrelationResult xcorr_sampled(const SampledWaveform& w1, const SampledWaveform& w2,
                                long lag = 0, double freq_offset = 0.0);

// Excess term o of the beta-domain bound |lambda| <= sinc + o.
// Throws ConfigError for alpha == 0 (exactly orthogonal, bound not defined).
double beta_orthogonality_bound(int M, double alpha);

// 3*sqrt(2)/sqrt(|d|). Throws ConfigError for d == 0.
double alpha_xcorr_bound(double delta_alpha);

// |<s(t), s(t - tau)>| at the end of the symbol, normalized over the overlap
// [tau, 1). tau in chips (1 chip = 1/M symbol), 0 <= tau < M. Evaluated in
// closed form: the phase difference is piecewise linear between wrap
// instants.
double autocorr_delay(const GmSymbolParams& p, int M, double tau_chips);

// sum_{i != j} |lambda(t_j - t_i)|^2 sigma_i^2 sigma_j^2 over the profile.
double leakage_variance(const GmSymbolParams& p, int M, const ChannelRealization& ch);

}  // namespace gm
