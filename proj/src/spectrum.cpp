#include "gm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "gm/error.hpp"
#include "gm/fft.hpp"

namespace gm {

namespace {

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long ceil_div(long a, long b) { return -floor_div(-a, b); }

}  // namespace

SpectrumEstimate estimate_psd(const GmConfig& cfg, const AlphaPolicy& alpha_policy,
                              const PsdOptions& opts, const RhoPolicy& rho_policy) {
  if (opts.trials < 1) throw ConfigError("PSD estimation needs at least one trial");
  if (cfg.oversample() < 4) throw ConfigError("PSD estimation needs oversample >= 4");
  if (opts.zero_pad < 2 || opts.zero_pad % 2 != 0) {
    throw ConfigError("zero padding factor must be even and >= 2");
  }

  const int M = cfg.M();
  const long R = cfg.rate();
  const long P = opts.zero_pad;
  const long N = R * P;

  std::vector<double> alphas;
  if (alpha_policy.kind == AlphaPolicy::Kind::kFixed) {
    alphas.push_back(alpha_policy.alpha);
  } else {
    alphas = cfg.alpha_set();
  }
  std::vector<cplx> rhos{cplx{1.0, 0.0}};
  if (rho_policy.kind == RhoPolicy::Kind::kPsk) {
    rhos = psk_constellation(rho_policy.order);
    cplx mean = std::accumulate(rhos.begin(), rhos.end(), cplx{0.0, 0.0});
    if (rho_policy.order < 2 || std::abs(mean) > 1e-9) {
      throw ConfigError("PSK rho policy needs a zero-mean constellation (order >= 2)");
    }
  }

  const std::size_t block = alphas.size() * static_cast<std::size_t>(M) * rhos.size();
  std::vector<std::size_t> order(block);
  std::mt19937_64 rng(opts.seed);

  std::vector<cplx> sum_s(static_cast<std::size_t>(N), cplx{0.0, 0.0});
  std::vector<double> sum_s2(static_cast<std::size_t>(N), 0.0);
  std::vector<double> sum_s4(static_cast<std::size_t>(N), 0.0);
  std::vector<double> sum_y(static_cast<std::size_t>(R), 0.0);
  std::vector<double> sum_y2(static_cast<std::size_t>(R), 0.0);
  std::vector<double> y(static_cast<std::size_t>(R));
  double sum_energy = 0.0;

  // Centered index c maps to zeta = (c - N/2) / P; bin of c in [0, R).
  std::vector<std::size_t> bin_of(static_cast<std::size_t>(N));
  for (long c = 0; c < N; ++c) {
    long j = ceil_div(c - N / 2 - P / 2, P);
    if (j >= R / 2) j -= R;
    bin_of[static_cast<std::size_t>(c)] = static_cast<std::size_t>(j + R / 2);
  }

  const double scale = 1.0 / static_cast<double>(R);
  for (int trial = 0; trial < opts.trials; ++trial) {
    const std::size_t pos = static_cast<std::size_t>(trial) % block;
    if (pos == 0) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), rng);
    }
    std::size_t idx = order[pos];
    const std::size_t ir = idx % rhos.size();
    idx /= rhos.size();
    const std::size_t ib = idx % static_cast<std::size_t>(M);
    const std::size_t ia = idx / static_cast<std::size_t>(M);

    const GmSymbolParams p{alphas[ia], static_cast<double>(ib), rhos[ir]};
    const auto w = synthesize(p, cfg);
    sum_energy += w.energy();
    const auto X = fft(w.samples, static_cast<std::size_t>(N));

    std::fill(y.begin(), y.end(), 0.0);
    for (long c = 0; c < N; ++c) {
      const auto kraw = static_cast<std::size_t>((c + N / 2) % N);
      const cplx s = X[kraw] * scale;
      const double s2 = std::norm(s);
      const auto cu = static_cast<std::size_t>(c);
      sum_s[cu] += s;
      sum_s2[cu] += s2;
      sum_s4[cu] += s2 * s2;
      y[bin_of[cu]] += s2 / static_cast<double>(P);
    }
    for (long j = 0; j < R; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      sum_y[ju] += y[ju];
      sum_y2[ju] += y[ju] * y[ju];
    }
  }

  const double T = opts.trials;
  SpectrumEstimate est;
  est.M = M;
  est.rate = static_cast<int>(R);
  est.zero_pad = static_cast<int>(P);
  est.trials = opts.trials;
  est.mean_energy = sum_energy / T;
  est.bin_freqs.resize(static_cast<std::size_t>(N));
  est.p_cont.resize(static_cast<std::size_t>(N));
  est.p_cont_se.resize(static_cast<std::size_t>(N));
  std::vector<double> mean_sq(static_cast<std::size_t>(N));
  for (long c = 0; c < N; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    est.bin_freqs[cu] = static_cast<double>(c - N / 2) / static_cast<double>(P);
    const cplx mean = sum_s[cu] / T;
    mean_sq[cu] = std::norm(mean);
    const double m2 = sum_s2[cu] / T;
    est.p_cont[cu] = std::max(0.0, m2 - mean_sq[cu]);
    const double var2 = std::max(0.0, sum_s4[cu] / T - m2 * m2);
    est.p_cont_se[cu] = std::sqrt(var2 / T);
  }

  est.line_freqs.resize(static_cast<std::size_t>(R));
  est.p_disc.resize(static_cast<std::size_t>(R));
  est.p_binned.assign(static_cast<std::size_t>(R), 0.0);
  est.p_binned_se.resize(static_cast<std::size_t>(R));
  for (long j = 0; j < R; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    est.line_freqs[ju] = static_cast<int>(j - R / 2);
    est.p_disc[ju] = mean_sq[static_cast<std::size_t>(j * P)];
    const double my = sum_y[ju] / T;
    est.p_binned_se[ju] = std::sqrt(std::max(0.0, sum_y2[ju] / T - my * my) / T);
  }
  for (long c = 0; c < N; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    est.p_binned[bin_of[cu]] += est.p_cont[cu] / static_cast<double>(P);
  }
  for (long j = 0; j < R; ++j) {
    est.p_binned[static_cast<std::size_t>(j)] += est.p_disc[static_cast<std::size_t>(j)];
  }
  est.total_power = std::accumulate(est.p_binned.begin(), est.p_binned.end(), 0.0);
  est.oow = oow(est, M);
  return est;
}

SpectrumEstimate psd_with_rho(const GmConfig& cfg, const AlphaPolicy& alpha_policy,
                              const RhoPolicy& rho_policy, const PsdOptions& opts) {
  return estimate_psd(cfg, alpha_policy, opts, rho_policy);
}

double oow(const SpectrumEstimate& spec, int M) {
  const double lo = -M / 2.0, hi = M / 2.0;
  double total = 0.0, outside = 0.0;
  for (std::size_t c = 0; c < spec.p_cont.size(); ++c) {
    const double p = spec.p_cont[c] / spec.zero_pad;
    total += p;
    const double z = spec.bin_freqs[c];
    if (z < lo || z >= hi) outside += p;
  }
  for (std::size_t j = 0; j < spec.p_disc.size(); ++j) {
    const double p = spec.p_disc[j];
    total += p;
    const double z = spec.line_freqs[j];
    if (z < lo || z >= hi) outside += p;
  }
  return total > 0.0 ? outside / total : 0.0;
}

EmissionMask::EmissionMask(std::vector<std::pair<double, double>> points)
    : points_(std::move(points)) {
  if (points_.size() < 2) throw ConfigError("emission mask needs at least two points");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].first > points_[i - 1].first)) {
      throw ConfigError("emission mask offsets must be strictly increasing");
    }
  }
  for (const auto& [f, db] : points_) {
    if (!std::isfinite(f) || !std::isfinite(db)) throw ConfigError("emission mask values must be finite");
  }
  symmetric_ = points_.front().first >= 0.0;
  if (!symmetric_ && points_.back().first <= 0.0) {
    throw ConfigError("two-sided emission mask must cover both signs of offset");
  }
}

EmissionMask EmissionMask::parse(const std::string& text) {
  std::vector<std::pair<double, double>> pts;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double f = 0.0, db = 0.0;
    if (!(ls >> f)) continue;
    std::string rest;
    if (!(ls >> db) || (ls >> rest)) {
      throw ConfigError("emission mask line " + std::to_string(lineno) + ": expected two columns");
    }
    pts.emplace_back(f, db);
  }
  return EmissionMask(std::move(pts));
}

EmissionMask EmissionMask::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open emission mask " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

double EmissionMask::limit_db(double f_hz) const {
  const double f = symmetric_ ? std::abs(f_hz) : f_hz;
  if (f <= points_.front().first) return points_.front().second;
  if (f >= points_.back().first) return points_.back().second;
  auto it = std::upper_bound(points_.begin(), points_.end(), f,
                             [](double v, const auto& p) { return v < p.first; });
  const auto& [f1, d1] = *(it - 1);
  const auto& [f2, d2] = *it;
  return d1 + (d2 - d1) * (f - f1) / (f2 - f1);
}

double EmissionMask::min_limit_db(double f1_hz, double f2_hz) const {
  double a = std::min(f1_hz, f2_hz), b = std::max(f1_hz, f2_hz);
  if (symmetric_) {
    const double lo = (a <= 0.0 && b >= 0.0) ? 0.0 : std::min(std::abs(a), std::abs(b));
    const double hi = std::max(std::abs(a), std::abs(b));
    a = lo;
    b = hi;
  }
  double m = std::min(limit_db(a), limit_db(b));
  for (const auto& [f, db] : points_) {
    if (f > a && f < b) m = std::min(m, db);
  }
  return m;
}

double EmissionMask::max_offset_hz() const {
  return std::max(std::abs(points_.front().first), std::abs(points_.back().first));
}

EmissionMask EmissionMask::relaxed(double delta_db) const {
  auto pts = points_;
  for (auto& p : pts) p.second += delta_db;
  return EmissionMask(std::move(pts));
}

bool mask_satisfied(const SpectrumEstimate& spec, const EmissionMask& mask, double w_sym) {
  if (!(w_sym > 0.0)) return false;
  const double total = spec.total_power > 0.0 ? spec.total_power : 1.0;
  for (std::size_t j = 0; j < spec.p_binned.size(); ++j) {
    const double p = spec.p_binned[j];
    if (p <= 0.0) continue;
    const double z = spec.line_freqs[j];
    const double density_db = 10.0 * std::log10(p / (total * w_sym));
    if (density_db > mask.min_limit_db((z - 0.5) * w_sym, (z + 0.5) * w_sym)) return false;
  }
  return true;
}

SymbolRate max_symbol_rate(const SpectrumEstimate& spec, int ell_sym, const EmissionMask& mask) {
  const double w_hi = 4.0 * mask.max_offset_hz();
  const double w_lo = 1e-6 * mask.max_offset_hz();
  constexpr double kStep = 1.02;

  double feasible = 0.0;
  for (double w = w_hi; w >= w_lo; w /= kStep) {
    if (mask_satisfied(spec, mask, w)) {
      feasible = w;
      break;
    }
  }
  if (feasible == 0.0) throw InfeasibleError("no symbol rate satisfies the emission mask");

  double lo = feasible, hi = feasible * kStep;
  if (feasible == w_hi) hi = feasible;
  while (hi / lo > 1.0 + 1e-4) {
    const double mid = std::sqrt(lo * hi);
    if (mask_satisfied(spec, mask, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, ell_sym * lo};
}

SymbolRate max_symbol_rate(const GmConfig& cfg, const EmissionMask& mask,
                           const AlphaPolicy& alpha_policy, const PsdOptions& opts,
                           const RhoPolicy& rho_policy) {
  const auto spec = estimate_psd(cfg, alpha_policy, opts, rho_policy);
  int ell = cfg.m();
  if (alpha_policy.kind == AlphaPolicy::Kind::kUniform) ell += cfg.n();
  if (rho_policy.kind == RhoPolicy::Kind::kPsk) ell += log2_exact(rho_policy.order);
  return max_symbol_rate(spec, ell, mask);
}

}  // namespace gm
