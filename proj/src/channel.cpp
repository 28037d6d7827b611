#include "gm/channel.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "gm/error.hpp"

namespace gm {

namespace {

cplx complex_gaussian(std::mt19937_64& rng, double variance) {
  std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void ChannelRealization::check_normalized(double tol) const {
  if (taps.empty()) throw ConfigError("channel has no taps");
  double sum = 0.0;
  for (const auto& t : taps) {
    if (t.power < 0.0) throw ConfigError("channel tap power must be nonnegative");
    sum += t.power;
  }
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream os;
    os << "channel power profile sums to " << sum << ", expected 1";
    throw ConfigError(os.str());
  }
}

ChannelRealization identity_channel() {
  ChannelRealization ch;
  ch.taps.push_back({{1.0, 0.0}, 0.0, 1.0});
  return ch;
}

double rms_delay_spread(const std::vector<Tap>& taps) {
  double p = 0.0, m1 = 0.0, m2 = 0.0;
  for (const auto& t : taps) {
    p += t.power;
    m1 += t.power * t.delay_chips;
    m2 += t.power * t.delay_chips * t.delay_chips;
  }
  if (p <= 0.0) return 0.0;
  m1 /= p;
  m2 /= p;
  return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

double noise_variance(const NoiseSpec& spec, int rate) {
  if (spec.ell_sym < 1) throw ConfigError("bits per symbol must be >= 1");
  return static_cast<double>(rate) / (spec.ell_sym * std::pow(10.0, spec.eb_n0_db / 10.0));
}

SampledWaveform awgn(const SampledWaveform& w, const NoiseSpec& spec, std::uint64_t seed) {
  if (std::isinf(spec.eb_n0_db) && spec.eb_n0_db > 0) return w;
  if (std::isnan(spec.eb_n0_db)) throw ConfigError("Eb/N0 must be a number");
  const double var = noise_variance(spec, w.rate);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(var / 2.0));
  SampledWaveform out = w;
  for (auto& x : out.samples) {
    const double re = nd(rng);
    const double im = nd(rng);
    x += cplx{re, im};
  }
  return out;
}

ChannelRealization draw_flat(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ChannelRealization ch;
  ch.taps.push_back({complex_gaussian(rng, 1.0), 0.0, 1.0});
  return ch;
}

ChannelRealization draw_selective(int n_taps, double rms_spread_chips, std::uint64_t seed) {
  if (n_taps < 2) throw ConfigError("selective channel needs at least two taps");
  if (!(rms_spread_chips > 0.0)) throw ConfigError("rms delay spread must be positive");
  std::vector<double> power(static_cast<std::size_t>(n_taps));
  double sum = 0.0;
  for (int i = 0; i < n_taps; ++i) {
    power[static_cast<std::size_t>(i)] = std::exp(-i / rms_spread_chips);
    sum += power[static_cast<std::size_t>(i)];
  }
  std::mt19937_64 rng(seed);
  ChannelRealization ch;
  for (int i = 0; i < n_taps; ++i) {
    const double p = power[static_cast<std::size_t>(i)] / sum;
    ch.taps.push_back({complex_gaussian(rng, p), static_cast<double>(i), p});
  }
  ch.rms_delay_spread_chips = rms_delay_spread(ch.taps);
  return ch;
}

SampledWaveform apply(const SampledWaveform& w, const ChannelRealization& ch, int M) {
  if (M < 1 || w.rate % M != 0) throw ConfigError("waveform rate must be a multiple of M");
  const int spc = w.rate / M;
  std::vector<long> delays;
  long max_delay = 0;
  for (const auto& t : ch.taps) {
    if (t.delay_chips < 0.0) throw ConfigError("negative tap delay");
    const long d = std::lround(t.delay_chips * spc);
    if (d >= w.rate) throw ConfigError("tap delay exceeds one symbol");
    delays.push_back(d);
    max_delay = std::max(max_delay, d);
  }
  SampledWaveform out;
  out.rate = w.rate;
  out.samples.assign(w.size() + static_cast<std::size_t>(max_delay), cplx{0.0, 0.0});
  for (std::size_t k = 0; k < ch.taps.size(); ++k) {
    const cplx g = ch.taps[k].gain;
    const auto d = static_cast<std::size_t>(delays[k]);
    for (std::size_t n = 0; n < w.size(); ++n) out.samples[n + d] += g * w.samples[n];
  }
  return out;
}

ChannelPreset ChannelPreset::parse(std::string_view text) {
  const std::string s = trim(text);
  ChannelPreset p;
  if (s == "awgn") return p;
  if (s == "flat") {
    p.kind = Kind::kFlat;
    return p;
  }
  const std::string prefix = "selective(";
  if (s.rfind(prefix, 0) == 0 && s.back() == ')') {
    const std::string args = s.substr(prefix.size(), s.size() - prefix.size() - 1);
    const auto comma = args.find(',');
    if (comma == std::string::npos) throw ConfigError("selective preset needs (n_taps, rms)");
    try {
      std::size_t used = 0;
      const std::string a0 = trim(args.substr(0, comma));
      const std::string a1 = trim(args.substr(comma + 1));
      p.n_taps = std::stoi(a0, &used);
      if (used != a0.size()) throw ConfigError("bad tap count");
      p.rms_spread_chips = std::stod(a1, &used);
      if (used != a1.size()) throw ConfigError("bad rms spread");
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse channel preset '" + s + "'");
    }
    p.kind = Kind::kSelective;
    if (p.n_taps < 2 || !(p.rms_spread_chips > 0.0)) {
      throw ConfigError("selective preset needs n_taps >= 2 and rms > 0");
    }
    return p;
  }
  throw ConfigError("unknown channel preset '" + s + "'");
}

std::string ChannelPreset::label() const {
  switch (kind) {
    case Kind::kAwgn:
      return "awgn";
    case Kind::kFlat:
      return "flat";
    case Kind::kSelective: {
      std::ostringstream os;
      os << "selective(" << n_taps << "," << rms_spread_chips << ")";
      return os.str();
    }
  }
  return {};
}

ChannelRealization ChannelPreset::draw(std::uint64_t seed) const {
  switch (kind) {
    case Kind::kAwgn:
      return identity_channel();
    case Kind::kFlat:
      return draw_flat(seed);
    case Kind::kSelective:
      return draw_selective(n_taps, rms_spread_chips, seed);
  }
  return identity_channel();
}

}  // namespace gm
