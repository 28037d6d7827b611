// Acceptance run: one PASS/FAIL line per criterion, indented detail lines
// below it. Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gm/correlation.hpp"
#include "gm/experiment.hpp"
#include "gm/modem.hpp"
#include "gm/preamble.hpp"
#include "gm/spectrum.hpp"
#include "gm/waveform.hpp"
#include "oracles.hpp"

using namespace gm;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void info(const std::string& what) { notes.push_back("     " + what); }
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<void(Outcome&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(dt < budget_s, fmt("runtime %.1f s within %.0f s", dt, budget_s));
  if (!o.pass) ++failures;
  std::printf("%s %2d %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, dt);
  for (const auto& n : o.notes) std::printf("        %s\n", n.c_str());
  std::fflush(stdout);
}

// ------------------------------------------------------------------ 1

void alphabet_payload(Outcome& o) {
  const int expect[3][4] = {{8, 3, 2, 5}, {128, 7, 3, 10}, {4096, 12, 4, 16}};
  for (const auto& e : expect) {
    const auto set = select_alpha_subset(e[0], AlphaSelection::kSmallestMagnitude);
    const auto b = payload_bits(e[0], set);
    o.require(b.m == e[1] && b.n == e[2] && b.ell_sym == e[3],
              fmt("M=%d: (m,n,l) = (%d,%d,%d), expected (%d,%d,%d)", e[0], b.m, b.n, b.ell_sym, e[1], e[2], e[3]));
  }
}

// ------------------------------------------------------------------ 2

void loopback(Outcome& o) {
  for (int M : {8, 128}) {
    const int nmax = log2_exact(static_cast<long long>(alphabet_alpha(M).size()) + 1) - 1;
    for (int n : {0, 1, nmax}) {
      for (auto pol : {AlphaSelection::kSmallestMagnitude, AlphaSelection::kLargestMagnitude}) {
        const GmConfig cfg(M, select_alpha_subset(M, pol, n));
        const Detector det(cfg);
        int errors = 0;
        std::vector<SymbolDecision> all;
        for (int a = 0; a < cfg.num_alpha(); ++a) {
          for (int b = 0; b < M; ++b) all.push_back({a, b});
        }
        const auto bits = demap(all, cfg);
        const auto tx = map_bits(bits, cfg);
        const auto rx = det.demodulate(transmit(tx, cfg));
        for (std::size_t i = 0; i < all.size(); ++i) errors += !(rx[i] == all[i]);
        const auto back = demap(rx, cfg);
        o.require(errors == 0 && back == bits,
                  fmt("M=%d N=%d (%s): %d symbols, %d errors", M, cfg.num_alpha(),
                      pol == AlphaSelection::kSmallestMagnitude ? "smallest" : "largest", int(all.size()), errors));
      }
    }
  }
}

// ------------------------------------------------------------------ 3

void orthogonality(Outcome& o) {
  const int M = 128;
  double worst_null = 0.0;
  const auto t0 = synthesize({0, 0}, M, 1);
  for (int d = 1; d < M; ++d) worst_null = std::max(worst_null, xcorr_sampled(t0, synthesize({0, double(d)}, M, 1)).magnitude);
  o.require(worst_null <= 1e-12, fmt("alpha=0 integer beta offsets: max |lambda| = %.2e", worst_null));

  double worst_excess = -1.0;
  for (double a : alphabet_alpha(M)) {
    if (a == 0) continue;
    const double bound = beta_orthogonality_bound(M, a);
    const auto s0 = synthesize({a, 0}, M, 8);
    for (int d = 1; d < M; ++d) {
      const double v = xcorr_sampled(s0, synthesize({a, double(d)}, M, 8)).magnitude;
      worst_excess = std::max(worst_excess, v - xcorr_beta(d) - bound);
    }
  }
  o.require(worst_excess <= 1e-6, fmt("sinc + o bound, all nonzero alpha: worst |lambda| - bound = %.3e", worst_excess));

  const auto alphas = alphabet_alpha(M);
  double worst_ratio = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    for (std::size_t j = i + 1; j < alphas.size(); ++j) {
      for (double b : {0.0, 17.0, 64.0, 127.0}) {
        const double v = xcorr_sampled(synthesize({alphas[i], b}, M, 8), synthesize({alphas[j], b}, M, 8)).magnitude;
        worst_ratio = std::max(worst_ratio, v / alpha_xcorr_bound(alphas[j] - alphas[i]));
        ++pairs;
      }
    }
  }
  o.require(worst_ratio < 1.0, fmt("alpha-pair bound over %d pairs: worst |lambda| / bound = %.3f", pairs, worst_ratio));
}

// ------------------------------------------------------------------ 4

void phase_continuity(Outcome& o) {
  for (int M : {8, 128, 4096}) {
    double worst = 0.0;
    for (double a : alphabet_alpha(M)) {
      for (int b = 0; b < M; ++b) {
        const double v = a / 2 + b - M / 2.0 + wrap_correction({a, double(b)}, M, 1.0) / 2;
        worst = std::max(worst, std::fabs(v - std::round(v)));
      }
    }
    o.require(worst < 1e-9, fmt("M=%d integer condition: worst distance %.2e", M, worst));
  }
  std::mt19937_64 rng(2024);
  for (int M : {8, 128}) {
    const GmConfig cfg(M, select_alpha_subset(M, AlphaSelection::kSmallestMagnitude), 8);
    std::uniform_int_distribution<int> pa(0, cfg.num_alpha() - 1), pb(0, M - 1);
    std::vector<SymbolDecision> syms(100);
    for (auto& s : syms) s = {pa(rng), pb(rng)};
    const auto w = transmit(syms, cfg);
    const auto R = static_cast<std::size_t>(cfg.rate());
    double worst = 0.0;
    for (std::size_t k = 1; k < syms.size(); ++k) {
      const double end = std::arg(w.samples[(k - 1) * R]) + symbol_phase(to_params(syms[k - 1], cfg), M, 1.0);
      worst = std::max(worst, std::fabs(oracle::wrap_pi(end - std::arg(w.samples[k * R]))));
    }
    o.require(worst < 1e-6, fmt("M=%d 100-symbol burst: worst junction jump %.2e rad", M, worst));
  }
}

// ------------------------------------------------------------------ 5

void autocorrelation(Outcome& o) {
  const int M = 128;
  double worst = 0.0;
  for (double tau = 0.0; tau < M; tau += 0.5) {
    for (double b : {0.0, 1.0, 64.0, 127.0}) worst = std::max(worst, std::fabs(autocorr_delay({0, b}, M, tau) - 1.0));
  }
  o.require(worst <= 1e-9, fmt("alpha=0: max | |lambda| - 1 | = %.2e over tau in [0, M)", worst));
  for (double tau : {1.0, 2.0, 4.0}) {
    const double v0 = autocorr_delay({0, 0}, M, tau);
    const double v4 = autocorr_delay({M / 4.0, 0}, M, tau);
    const double v2 = autocorr_delay({M / 2.0, 0}, M, tau);
    const double v1 = autocorr_delay({double(M), 0}, M, tau);
    o.require(v0 > v4 && v4 > v2 && v2 > v1,
              fmt("tau=%g chips: %.6f > %.6f > %.6f > %.6f", tau, v0, v4, v2, v1));
  }
}

// ------------------------------------------------------------------ 6

void spectral(Outcome& o) {
  const int M = 128;
  const PsdOptions opts{4096, 1, 8};
  const GmConfig fsk = GmConfig::fixed_alpha(M, 0, 8);
  const auto c = psd_with_rho(fsk, AlphaPolicy::fixed(0), RhoPolicy::constant(), opts);
  const auto q = psd_with_rho(fsk, AlphaPolicy::fixed(0), RhoPolicy::psk(4), opts);
  o.require(q.oow > c.oow, fmt("QPSK rho OoW %.5f > constant rho OoW %.5f", q.oow, c.oow));

  std::vector<double> mags;
  for (double a : alphabet_alpha(M)) {
    if (a >= 0) mags.push_back(a);
  }
  std::vector<double> oows;
  double worst_parseval = 0.0;
  for (double a : mags) {
    const auto s = estimate_psd(GmConfig::fixed_alpha(M, a, 8), AlphaPolicy::fixed(a), opts);
    oows.push_back(s.oow);
    worst_parseval = std::max(worst_parseval, std::fabs(s.total_power / s.mean_energy - 1.0));
  }
  auto oow_at = [&](double a) {
    for (std::size_t i = 0; i < mags.size(); ++i) {
      if (mags[i] == a) return oows[i];
    }
    throw std::logic_error("alpha not in alphabet");
  };
  const double o0 = oow_at(0), o4 = oow_at(M / 4.0), o2 = oow_at(M / 2.0), o1 = oow_at(M);
  o.require(o0 < o4 && o4 < o2 && o2 < o1,
            fmt("OoW alpha=0 %.5f < M/4 %.5f < M/2 %.5f < M %.5f", o0, o4, o2, o1));
  std::string seq;
  for (std::size_t i = 0; i < oows.size(); ++i) seq += fmt("%g:%.4f ", mags[i], oows[i]);
  o.info("OoW over all |alpha| in the alphabet: " + seq);

  int worst_bins = 0;
  double worst_z = 0.0;
  for (double a : mags) {
    if (a == 0) continue;
    const auto p = estimate_psd(GmConfig::fixed_alpha(M, a, 8), AlphaPolicy::fixed(a), {4096, 11, 8});
    const auto n = estimate_psd(GmConfig::fixed_alpha(M, -a, 8), AlphaPolicy::fixed(-a), {4096, 12, 8});
    worst_parseval = std::max(worst_parseval, std::fabs(n.total_power / n.mean_energy - 1.0));
    int bad = 0;
    for (std::size_t j = 0; j < p.p_binned.size(); ++j) {
      const double se = std::hypot(p.p_binned_se[j], n.p_binned_se[j]);
      const double diff = std::fabs(p.p_binned[j] - n.p_binned[j]);
      if (se > 0) worst_z = std::max(worst_z, diff / se);
      if (diff > 3 * se + 1e-15) ++bad;
    }
    worst_bins += bad;
  }
  o.require(worst_bins == 0, fmt("+alpha vs -alpha PSD, 4096 trials: %d bins beyond 3 SE (worst %.2f SE)", worst_bins, worst_z));
  worst_parseval = std::max(worst_parseval, std::fabs(c.total_power / c.mean_energy - 1.0));
  worst_parseval = std::max(worst_parseval, std::fabs(q.total_power / q.mean_energy - 1.0));
  o.require(worst_parseval <= 1e-3, fmt("Parseval: worst relative error %.2e", worst_parseval));
}

// ------------------------------------------------------------------ 7

void mask_rates(Outcome& o) {
  const int M = 128;
  const auto mask = EmissionMask::load(GM_DATA_DIR "/reference_mask.txt");
  const PsdOptions opts{4096, 1, 8};
  auto rate = [&](double a, RhoPolicy rho) {
    return max_symbol_rate(GmConfig::fixed_alpha(M, a, 8), mask, AlphaPolicy::fixed(a), opts, rho).w_sym;
  };
  const double w0 = rate(0, RhoPolicy::constant());
  const double w2 = rate(M / 2.0, RhoPolicy::constant());
  const double w1 = rate(M, RhoPolicy::constant());
  const double wq = rate(0, RhoPolicy::psk(4));
  o.require(w0 >= w2 && w2 >= w1, fmt("w_sym alpha=0 %.0f >= alpha=M/2 %.0f >= alpha=M %.0f", w0, w2, w1));
  o.require(w0 / wq > 2.0, fmt("constant rho %.0f vs QPSK rho %.0f: ratio %.2f > 2", w0, wq, w0 / wq));
  o.info("reference mask is a fixed yardstick, not a published mask; only orderings are checked");
}

// ------------------------------------------------------------------ 8

void ser_oracle(Outcome& o) {
  ExperimentConfig e;
  e.modem = {"fsk8", 8, {0.0}, 1, {}};
  e.channel = ChannelPreset::parse("awgn");
  e.eb_n0_db = {6.0, 8.0, 10.0};
  e.min_errors = 200;
  e.max_symbols = 10'000'000;
  e.seed = 8;
  const auto c = run_ser_campaign(e);
  for (const auto& p : c.points) {
    const double ref = oracle::mfsk_noncoherent_ser(8, 3.0 * std::pow(10.0, p.eb_n0_db / 10));
    const double half = (p.ser_ci.hi - p.ser_ci.lo) / 2;
    o.require(std::fabs(p.ser - ref) <= 3 * half,
              fmt("%g dB: SER %.4e (%lld/%lld), closed form %.4e, |diff| = %.2f half-widths", p.eb_n0_db, p.ser,
                  p.symbol_errors, p.symbols, ref, std::fabs(p.ser - ref) / half));
  }
}

// ------------------------------------------------------------------ 9

SerCurve campaign(const std::string& label, int M, std::vector<double> alphas, const std::string& chan,
                  std::vector<double> grid, long long min_err, long long max_sym, Receiver rx) {
  ExperimentConfig e;
  e.modem = {label, M, std::move(alphas), 8, {}};
  e.channel = ChannelPreset::parse(chan);
  e.eb_n0_db = std::move(grid);
  e.min_errors = min_err;
  e.max_symbols = max_sym;
  e.seed = 9;
  e.receiver = rx;
  return run_ser_campaign(e);
}

std::string curve_text(const SerCurve& c) {
  std::string s = c.label + ":";
  for (const auto& p : c.points) s += fmt(" %g dB %.2e", p.eb_n0_db, p.ser);
  return s;
}

void ordering(Outcome& o, const SerCurve& better, const SerCurve& worse, const std::string& what) {
  bool ok = true;
  for (std::size_t i = 0; i < better.points.size(); ++i) ok = ok && better.points[i].ser < worse.points[i].ser;
  o.require(ok, what);
  o.info(curve_text(better));
  o.info(curve_text(worse));
}

void regimes(Outcome& o) {
  const auto dft = Receiver::kDft;
  const auto cm = Receiver::kChannelMatched;
  {
    const auto a0 = campaign("alpha=0", 32, {0}, "awgn", {2, 4, 6}, 1000, 4'000'000, dft);
    const auto aM = campaign("alpha=M", 32, {32}, "awgn", {2, 4, 6}, 1000, 4'000'000, dft);
    ordering(o, a0, aM, "AWGN, M=32: SER(alpha=0) < SER(alpha=M) at every grid point");
  }
  {
    const auto a0 = campaign("alpha=0", 32, {0}, "flat", {10, 15, 20}, 2000, 4'000'000, dft);
    const auto aM = campaign("alpha=M", 32, {32}, "flat", {10, 15, 20}, 2000, 4'000'000, dft);
    ordering(o, a0, aM, "flat Rayleigh, M=32: SER(alpha=0) < SER(alpha=M) at every grid point");
  }
  for (int M : {32, 128}) {
    const auto a0 = campaign("alpha=0", M, {0}, "selective(8, 2)", {10, 15, 20}, 400, 200'000, cm);
    const auto aM = campaign("alpha=M", M, {double(M)}, "selective(8, 2)", {10, 15, 20}, 400, 200'000, cm);
    ordering(o, aM, a0, fmt("selective(8, 2), M=%d, channel-matched receiver: SER(alpha=M) < SER(alpha=0)", M));
  }
  {
    // the per-branch dechirp + DFT detector has no multipath knowledge;
    // reported for reference only
    const auto a0 = campaign("dft alpha=0", 128, {0}, "selective(8, 2)", {10, 15, 20}, 400, 200'000, dft);
    const auto aM = campaign("dft alpha=M", 128, {128}, "selective(8, 2)", {10, 15, 20}, 400, 200'000, dft);
    o.info("reference, dechirp + DFT receiver on selective(8, 2), M=128 (not part of the check):");
    o.info(curve_text(a0));
    o.info(curve_text(aM));
  }

  std::vector<EfficiencyPoint> points;
  {
    SweepConfig s;
    s.modems = {{"baseline", 128, {0}, 8, {}}, {"full-throttle", 128, select_alpha_subset(128, AlphaSelection::kLargestMagnitude), 8, {}}};
    s.channels = {ChannelPreset::parse("awgn")};
    s.eb_n0_db = {1, 2, 3, 4, 5};
    s.min_errors = 400;
    s.max_symbols = 400'000;
    s.seed = 9;
    const auto r = efficiency_sweep(s);
    const auto& b = r.points[0];
    const auto& f = r.points[1];
    o.require(f.eta < b.eta && f.eps_db <= b.eps_db,
              fmt("AWGN, M=128: full-throttle (eta %.2f, eps %.2f dB) dominates baseline (eta %.2f, eps %.2f dB)",
                  f.eta, f.eps_db, b.eta, b.eps_db));
    points.insert(points.end(), r.points.begin(), r.points.end());
  }
  {
    SweepConfig s;
    s.modems = {{"LoRa", 128, {128}, 8, {}}, {"antipodal", 128, {-128, 128}, 8, {}}};
    s.channels = {ChannelPreset::parse("selective(8, 2)")};
    s.eb_n0_db = {0, 2, 4, 6, 8, 10};
    s.min_errors = 400;
    s.max_symbols = 400'000;
    s.seed = 9;
    s.receiver = cm;
    const auto r = efficiency_sweep(s);
    o.info(fmt("selective(8, 2), channel-matched: LoRa (eta %.2f, eps %.2f dB), antipodal (eta %.2f, eps %.2f dB)",
               r.points[0].eta, r.points[0].eps_db, r.points[1].eta, r.points[1].eps_db));
    points.insert(points.end(), r.points.begin(), r.points.end());
  }
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& p : points) margin = std::min(margin, p.eps_db - shannon_bound(p.eta).db);
  o.require(margin > 0, fmt("%d efficiency points above the Shannon curve, smallest gap %.2f dB", int(points.size()), margin));
}

// ------------------------------------------------------------------ 10

void preamble(Outcome& o) {
  const int M = 128;
  const int rate = M * 8;
  std::vector<double> offs;
  for (double d = 0.0; d <= M / 4.0 + 1e-9; d += 0.25) offs.push_back(d);
  const auto chirp = tolerance_curve(PreambleSpec::chirp(M, -M / 2.0, rate), offs);
  const auto tone = tolerance_curve(PreambleSpec::tone(-M / 2.0, rate), offs);
  double chirp_gap = std::numeric_limits<double>::infinity();
  double tone_err = 0.0;
  double dominance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < offs.size(); ++i) {
    const double d = offs[i];
    chirp_gap = std::min(chirp_gap, chirp[i].peak - (1 - d / M - 0.02));
    tone_err = std::max(tone_err, std::fabs(tone[i].peak - std::fabs(oracle::sinc(d))));
    if (d >= 0.5) dominance = std::min(dominance, chirp[i].peak - tone[i].peak);
  }
  o.require(chirp_gap >= 0, fmt("chirp peak >= 1 - |delta/alpha_p| - 0.02 over %d offsets in [0, M/4]: min margin %.4f",
                                int(offs.size()), chirp_gap));
  o.require(tone_err <= 1e-3, fmt("tone peak vs |sinc(delta)|: max error %.2e", tone_err));
  o.require(dominance > 0, fmt("chirp - tone for delta >= 0.5: min %.4f", dominance));
  o.info(fmt("delta=32: chirp %.4f at lag %ld, tone %.2e", chirp.back().peak, chirp.back().best_lag, tone.back().peak));
}

}  // namespace

int main() {
  criterion(1, "alphabet and payload sizes", 1, alphabet_payload);
  criterion(2, "noiseless exhaustive loopback", 10, loopback);
  criterion(3, "orthogonality suite", 30, orthogonality);
  criterion(4, "phase continuity", 10, phase_continuity);
  criterion(5, "delay autocorrelation ordering", 10, autocorrelation);
  criterion(6, "spectral suite", 300, spectral);
  criterion(7, "mask-limited rate ordering", 300, mask_rates);
  criterion(8, "AWGN SER against the closed form", 600, ser_oracle);
  criterion(9, "channel-regime ordering and efficiency", 1800, regimes);
  criterion(10, "preamble frequency-offset tolerance", 60, preamble);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
