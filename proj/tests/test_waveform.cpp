#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gm/error.hpp"
#include "gm/modem.hpp"
#include "gm/waveform.hpp"
#include "oracles.hpp"

using namespace gm;
using oracle::kPi;

TEST_CASE("alphabet members") {
  const std::vector<double> a128{-128, -64, -32, -16, -8, -4, -2, 0, 2, 4, 8, 16, 32, 64, 128};
  CHECK(alphabet_alpha(128) == a128);
  CHECK(alphabet_alpha(2) == std::vector<double>{-2, 0, 2});
  CHECK(alphabet_alpha(8) == std::vector<double>{-8, -4, -2, 0, 2, 4, 8});
  for (int m = 2; m <= 14; ++m) {
    const int M = 1 << m;
    const auto a = alphabet_alpha(M);
    CHECK(a.size() == static_cast<std::size_t>(2 * m + 1));
    for (double v : a) CHECK(std::fmod(v, 2.0) == 0.0);
    CHECK(std::is_sorted(a.begin(), a.end()));
  }
  CHECK_THROWS_AS(alphabet_alpha(12), ConfigError);
  CHECK_THROWS_AS(alphabet_alpha(1), ConfigError);
}

TEST_CASE("payload bits") {
  auto maxset = [](int M) { return select_alpha_subset(M, AlphaSelection::kSmallestMagnitude); };
  auto b8 = payload_bits(8, maxset(8));
  CHECK(b8.m == 3);
  CHECK(b8.n == 2);
  CHECK(b8.ell_sym == 5);
  auto b128 = payload_bits(128, maxset(128));
  CHECK(b128.ell_sym == 10);
  auto b4096 = payload_bits(4096, maxset(4096));
  CHECK(b4096.m == 12);
  CHECK(b4096.n == 4);
  CHECK(b4096.ell_sym == 16);
  const std::vector<double> zero{0.0};
  CHECK(payload_bits(8, zero).ell_sym == 3);
  const std::vector<double> three{-8, 0, 8};
  CHECK_THROWS_AS(payload_bits(8, three), ConfigError);
  const std::vector<double> odd{0, 3};
  CHECK_THROWS_AS(payload_bits(8, odd), ConfigError);
  CHECK_THROWS_AS(GmConfig(8, {0.0}, 0), ConfigError);
}

TEST_CASE("sub-alphabet selection") {
  CHECK(select_alpha_subset(128, AlphaSelection::kSmallestMagnitude) ==
        std::vector<double>{-16, -8, -4, -2, 0, 2, 4, 8});
  CHECK(select_alpha_subset(128, AlphaSelection::kLargestMagnitude) ==
        std::vector<double>{-128, -64, -32, -16, 16, 32, 64, 128});
  CHECK(select_alpha_subset(128, AlphaSelection::kAntipodalFull) == std::vector<double>{-128, 128});
  CHECK(select_alpha_subset(128, AlphaSelection::kSmallestMagnitude, 1) == std::vector<double>{-2, 0});
}

TEST_CASE("instantaneous frequency") {
  CHECK(inst_frequency({0, 0}, 8, 0.7) == doctest::Approx(-4));
  CHECK(inst_frequency({8, 3}, 8, 0.0) == doctest::Approx(-1));
  CHECK(inst_frequency({8, 3}, 8, 0.625) == doctest::Approx(-4));
  CHECK(inst_frequency({-8, 3}, 8, 0.5) == doctest::Approx(3));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int M : {8, 128}) {
    for (double a : alphabet_alpha(M)) {
      for (int k = 0; k < 200; ++k) {
        const double b = std::floor(u(rng) * M);
        const double f = inst_frequency({a, b}, M, u(rng));
        CHECK(f >= -M / 2.0);
        CHECK(f < M / 2.0);
      }
    }
  }
}

TEST_CASE("wrap breakpoints") {
  auto w = wrap_breakpoints({8, 3}, 8);
  REQUIRE(w.size() == 1);
  CHECK(w[0] == doctest::Approx(0.625));
  CHECK(wrap_breakpoints({128, 0}, 128).empty());
  CHECK(wrap_breakpoints({0, 5}, 8).empty());
  // every retained instant is a jump of the frequency law, and vice versa
  for (double a : alphabet_alpha(32)) {
    for (int b = 0; b < 32; b += 5) {
      const auto br = wrap_breakpoints({a, static_cast<double>(b)}, 32);
      int jumps = 0;
      const int steps = 20000;
      for (int i = 1; i < steps; ++i) {
        const double f0 = oracle::freq(a, b, 32, (i - 1) / double(steps));
        const double f1 = oracle::freq(a, b, 32, i / double(steps));
        if (std::fabs(f1 - f0) > 16) ++jumps;
      }
      CHECK(static_cast<int>(br.size()) == jumps);
    }
  }
}

TEST_CASE("symbol phase examples") {
  for (double t : {0.0, 0.3, 0.9}) CHECK(symbol_phase({0, 4}, 8, t) == doctest::Approx(0.0));
  const double end = symbol_phase({8, 3}, 8, 1.0);
  CHECK(std::fabs(oracle::wrap_pi(end)) < 1e-12);
  CHECK(wrap_correction({8, 3}, 8, 1.0) == doctest::Approx(-6));
  for (double a : alphabet_alpha(16)) {
    for (int b = 0; b < 16; ++b) CHECK(symbol_phase({a, double(b)}, 16, 0.0) == 0.0);
  }
}

TEST_CASE("phase continuity integer condition") {
  for (int M : {8, 128, 4096}) {
    double worst = 0.0;
    for (double a : alphabet_alpha(M)) {
      for (int b = 0; b < M; ++b) {
        const double v = a / 2 + b - M / 2.0 + wrap_correction({a, double(b)}, M, 1.0) / 2;
        worst = std::max(worst, std::fabs(v - std::round(v)));
      }
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("phase matches the integrated frequency law") {
  for (double a : {-8.0, -2.0, 0.0, 4.0, 8.0}) {
    for (double b : {0.0, 3.0, 7.0}) {
      for (double t : {0.25, 0.5, 0.8, 1.0}) {
        const double ref = oracle::integrated_phase(a, b, 8, t);
        const double got = symbol_phase({a, b}, 8, t);
        CHECK(std::fabs(oracle::wrap_pi(got - ref)) < 1e-3);
      }
    }
  }
}

TEST_CASE("phase derivative is 2 pi times the frequency") {
  const int M = 32;
  const int os = 64;
  const double h = 1.0 / (M * os);
  for (double a : alphabet_alpha(M)) {
    for (double b : {0.0, 5.0, 31.0}) {
      const auto br = wrap_breakpoints({a, b}, M);
      for (int i = 1; i < M * os - 1; ++i) {
        const double t = i * h;
        bool near = false;
        for (double q : br) near = near || std::fabs(t - q) <= 1.5 * h;
        if (near) continue;
        const double d = (symbol_phase({a, b}, M, t + h) - symbol_phase({a, b}, M, t - h)) / (2 * h);
        const double f = 2 * kPi * oracle::freq(a, b, M, t);
        CHECK(std::fabs(d - f) <= 1e-6 * std::max(1.0, std::fabs(f)));
      }
    }
  }
}

TEST_CASE("synthesis") {
  const auto w = synthesize({8, 0}, 8, 1);
  REQUIRE(w.size() == 8);
  CHECK(w.rate == 8);
  for (int i = 0; i < 8; ++i) {
    const auto ref = std::polar(1.0, kPi * (i * i / 8.0 - i));
    CHECK(std::abs(w.samples[i] - ref) < 1e-12);
  }
  const auto tone = synthesize({0, 0}, 8, 1);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(tone.samples[i] - cplx(i % 2 ? -1.0 : 1.0, 0.0)) < 1e-12);
  // oversample=1, alpha=M for every beta, against the direct sampled form
  for (int M : {8, 128}) {
    for (int b = 0; b < M; ++b) {
      const auto s = synthesize({double(M), double(b)}, M, 1);
      for (int i = 0; i < M; ++i) {
        const auto ref = std::polar(1.0, kPi * (double(i) * i / M + 2.0 * b * i / M - i));
        CHECK(std::abs(s.samples[i] - ref) < 1e-9);
      }
    }
  }
  for (double a : alphabet_alpha(64)) {
    const auto s = synthesize({a, 17}, 64, 8);
    CHECK(s.size() == 512);
    for (const auto& v : s.samples) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.energy() == doctest::Approx(1.0));
  }
}

TEST_CASE("burst phase continuity") {
  std::mt19937_64 rng(11);
  for (int M : {8, 128}) {
    const GmConfig cfg(M, select_alpha_subset(M, AlphaSelection::kSmallestMagnitude), 8);
    std::uniform_int_distribution<int> pa(0, cfg.num_alpha() - 1), pb(0, M - 1);
    std::vector<SymbolDecision> syms(100);
    for (auto& s : syms) s = {pa(rng), pb(rng)};
    const auto w = transmit(syms, cfg);
    const int R = cfg.rate();
    double worst = 0.0;
    for (std::size_t k = 1; k < syms.size(); ++k) {
      // phase at the end of symbol k-1 (left limit) against the first sample of symbol k
      const auto p = to_params(syms[k - 1], cfg);
      const double end = symbol_phase(p, M, 1.0);
      const double start = std::arg(w.samples[k * R]);
      const double prev_start = std::arg(w.samples[(k - 1) * R]);
      worst = std::max(worst, std::fabs(oracle::wrap_pi(prev_start + end - start)));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("special cases") {
  const auto lora = special_case_symbols(SpecialCase::kLoRa, 128);
  CHECK(lora.size() == 128);
  for (const auto& p : lora) CHECK(p.alpha == 128);
  const auto fsk = special_case_symbols(SpecialCase::kFsk, 8);
  CHECK(fsk.size() == 8);
  for (const auto& p : fsk) CHECK(p.alpha == 0);
  const auto qpsk = psk_constellation(4);
  const auto qam = special_case_symbols(SpecialCase::kQam, 16, qpsk);
  CHECK(qam.size() == 4);
  for (const auto& p : qam) {
    CHECK(p.alpha == 0);
    CHECK(p.beta == 0);
  }
  CHECK(special_case_symbols(SpecialCase::kFqam, 8, qpsk).size() == 32);
  for (const auto& p : special_case_symbols(SpecialCase::kPskLoRa, 8, qpsk)) CHECK(p.alpha == 8);
  CHECK(parse_special_case("LoRa") == SpecialCase::kLoRa);
  CHECK_THROWS_AS(parse_special_case("OFDM"), ConfigError);
}

TEST_CASE("canonical waveform") {
  const auto w = synthesize_canonical({4, 2, cplx(0, 1)}, 64);
  for (int i = 0; i < 64; ++i) {
    const double t = i / 64.0;
    CHECK(std::abs(w.samples[i] - cplx(0, 1) * std::polar(1.0, kPi * (4 * t * t + 4 * t))) < 1e-12);
  }
}
