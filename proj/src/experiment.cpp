#include "gm/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <random>

#include "gm/error.hpp"
#include "gm/fft.hpp"
#include "gm/modem.hpp"

namespace gm {

ShannonPoint shannon_bound(double eta) {
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  const double lin = eta * std::expm1(std::log(2.0) / eta);
  return {lin, 10.0 * std::log10(lin)};
}

ResourceEfficiency resource_efficiency(const GmConfig& cfg, double w_pass_dof) {
  if (!(w_pass_dof >= cfg.M())) throw ConfigError("passband must span at least M degrees of freedom");
  const double u = cfg.ell_sym() / w_pass_dof;
  return {u, 1.0 / u};
}

Interval wilson_interval(long long k, long long n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ChannelMatchedDetector::ChannelMatchedDetector(const GmConfig& cfg, const ChannelRealization& ch) : M_(cfg.M()) {
  for (const auto& t : ch.taps) {
    const double d = std::round(t.delay_chips);
    if (d != t.delay_chips || d < 0 || d >= M_) {
      throw ConfigError("channel-matched detection needs whole-chip delays within one symbol");
    }
    delays_.push_back(static_cast<int>(d));
    gains_.push_back(t.gain);
  }
  const std::size_t L = delays_.size();
  for (double a : cfg.alpha_set()) {
    const auto ref = reference_chirp(a, M_);
    // Gram matrix of the delayed, truncated reference chirps.
    std::vector<cplx> gram(L * L);
    for (std::size_t i = 0; i < L; ++i) {
      for (std::size_t j = 0; j < L; ++j) {
        cplx acc{0.0, 0.0};
        for (int n = std::max(delays_[i], delays_[j]); n < M_; ++n) {
          acc += ref[static_cast<std::size_t>(n - delays_[i])] * std::conj(ref[static_cast<std::size_t>(n - delays_[j])]);
        }
        gram[i * L + j] = acc;
      }
    }
    std::vector<double> inv(static_cast<std::size_t>(M_));
    for (int b = 0; b < M_; ++b) {
      std::vector<cplx> c(L);
      for (std::size_t i = 0; i < L; ++i) {
        c[i] = gains_[i] * std::polar(1.0, -2.0 * std::numbers::pi * b * delays_[i] / M_);
      }
      cplx e{0.0, 0.0};
      for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t j = 0; j < L; ++j) e += c[i] * std::conj(c[j]) * gram[i * L + j];
      }
      inv[static_cast<std::size_t>(b)] = e.real() > 0.0 ? 1.0 / std::sqrt(e.real()) : 0.0;
    }
    inv_norm_.push_back(std::move(inv));
    auto cr = ref;
    for (auto& v : cr) v = std::conj(v);
    conj_refs_.push_back(std::move(cr));
  }
}

Detection ChannelMatchedDetector::detect(std::span<const cplx> chips, std::size_t start) const {
  const int cols = static_cast<int>(conj_refs_.size());
  const auto Mu = static_cast<std::size_t>(M_);
  Detection det{DetectionMatrix(M_, cols), {}};
  std::vector<cplx> theta(Mu);
  std::vector<cplx> acc(Mu);
  for (int a = 0; a < cols; ++a) {
    const auto& ref = conj_refs_[static_cast<std::size_t>(a)];
    std::fill(acc.begin(), acc.end(), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < delays_.size(); ++i) {
      const auto d = static_cast<std::size_t>(delays_[i]);
      std::fill(theta.begin(), theta.end(), cplx{0.0, 0.0});
      // finger i sees the path delayed by d: y[m + d] against s[m], m + d < M
      for (std::size_t m = 0; m + d < Mu; ++m) {
        const std::size_t idx = start + m + d;
        if (idx >= chips.size()) break;
        theta[m] = chips[idx] * ref[m];
      }
      const auto D = fft(theta);
      const cplx w = std::conj(gains_[i]);
      for (std::size_t b = 0; b < Mu; ++b) acc[b] += w * D[b];
    }
    const auto& inv = inv_norm_[static_cast<std::size_t>(a)];
    for (int b = 0; b < M_; ++b) {
      det.scores.at(b, a) = std::abs(acc[static_cast<std::size_t>(b)]) * inv[static_cast<std::size_t>(b)];
    }
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

Receiver parse_receiver(const std::string& name) {
  if (name == "dft") return Receiver::kDft;
  if (name == "channel_matched") return Receiver::kChannelMatched;
  throw ConfigError("receiver must be \"dft\" or \"channel_matched\"");
}

std::string receiver_name(Receiver r) { return r == Receiver::kDft ? "dft" : "channel_matched"; }

ModemSetup ModemSetup::for_channel(const ChannelPreset& ch) const {
  if (alpha_policy.empty()) return *this;
  ModemSetup m = *this;
  std::string policy = alpha_policy;
  if (policy == "default") policy = ch.kind == ChannelPreset::Kind::kSelective ? "antipodal" : "smallest";
  m.alpha_set = alpha_set_for_policy(M, policy);
  m.alpha_policy.clear();
  return m;
}

GmConfig ModemSetup::config() const {
  if (!alpha_policy.empty()) return for_channel(ChannelPreset::parse("awgn")).config();
  return GmConfig(M, alpha_set, oversample);
}

namespace {

double parse_db(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  }
  throw ConfigError("Eb/N0 entries must be numbers or \"inf\"");
}

nlohmann::json db_to_json(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  return v;
}

std::vector<double> parse_grid(const nlohmann::json& j) {
  if (!j.is_array()) throw ConfigError("eb_n0_db must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(parse_db(v));
  return out;
}

ModemSetup parse_modem(const nlohmann::json& j) {
  ModemSetup m;
  m.label = j.value("label", std::string{});
  m.M = j.at("M").get<int>();
  if (j.contains("alpha_set")) {
    m.alpha_set = j.at("alpha_set").get<std::vector<double>>();
  } else {
    m.alpha_set.clear();
    m.alpha_policy = j.value("alpha_policy", std::string("default"));
  }
  m.oversample = j.value("oversample", 1);
  if (m.label.empty()) {
    m.label = "M" + std::to_string(m.M) + (m.alpha_policy.empty() ? "_N" + std::to_string(m.alpha_set.size())
                                                                   : "_" + m.alpha_policy);
  }
  return m;
}

nlohmann::json modem_json(const ModemSetup& m) {
  nlohmann::json j = {{"label", m.label}, {"M", m.M}, {"oversample", m.oversample}};
  if (m.alpha_policy.empty()) {
    j["alpha_set"] = m.alpha_set;
  } else {
    j["alpha_policy"] = m.alpha_policy;
  }
  return j;
}

void validate_common(const std::vector<double>& grid, long long min_errors, long long max_symbols, int burst) {
  if (grid.empty()) throw ConfigError("Eb/N0 grid is empty");
  for (double v : grid) {
    if (std::isnan(v) || (std::isinf(v) && v < 0)) throw ConfigError("invalid Eb/N0 value");
  }
  if (min_errors <= 0 || max_symbols <= 0) throw ConfigError("stopping rule must be positive");
  if (burst <= 0) throw ConfigError("burst length must be positive");
  if (max_symbols < burst) throw InfeasibleError("max_symbols is smaller than one burst");
}

template <typename T>
T json_value_checked(const nlohmann::json& j, const char* key, T fallback) {
  try {
    return j.value(key, fallback);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for ") + key + ": " + e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  (void)modem.config();
  validate_common(eb_n0_db, min_errors, max_symbols, burst_symbols);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig e;
    e.channel = ChannelPreset::parse(j.value("channel", std::string("awgn")));
    e.modem = parse_modem(j.at("modem")).for_channel(e.channel);
    e.eb_n0_db = parse_grid(j.at("eb_n0_db"));
    e.min_errors = json_value_checked<long long>(j, "min_errors", e.min_errors);
    e.max_symbols = json_value_checked<long long>(j, "max_symbols", e.max_symbols);
    e.burst_symbols = json_value_checked<int>(j, "burst_symbols", e.burst_symbols);
    e.seed = json_value_checked<std::uint64_t>(j, "seed", e.seed);
    e.receiver = parse_receiver(json_value_checked<std::string>(j, "receiver", "dft"));
    e.out = json_value_checked<std::string>(j, "out", e.out);
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("experiment config: ") + ex.what());
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json grid = nlohmann::json::array();
  for (double v : eb_n0_db) grid.push_back(db_to_json(v));
  return {{"modem", modem_json(modem)},     {"channel", channel.label()},
          {"eb_n0_db", grid},               {"min_errors", min_errors},
          {"max_symbols", max_symbols},     {"burst_symbols", burst_symbols},
          {"seed", seed},                   {"receiver", receiver_name(receiver)},
          {"out", out}};
}

namespace {

// Transmit-side symbol table: every (alpha index, beta) waveform at the
// sample rate, and its image after the receiver front end.
class SymbolTable {
 public:
  explicit SymbolTable(const GmConfig& cfg) : cfg_(cfg) {
    const auto R = static_cast<std::size_t>(cfg.rate());
    const auto Mu = static_cast<std::size_t>(cfg.M());
    const auto count = static_cast<std::size_t>(cfg.num_alpha()) * Mu;
    tx_.resize(count * R);
    rx_.resize(count * Mu);
    for (int a = 0; a < cfg.num_alpha(); ++a) {
      for (int b = 0; b < cfg.M(); ++b) {
        const auto w = synthesize(to_params({a, b}, cfg), cfg);
        const auto k = index({a, b});
        std::copy(w.samples.begin(), w.samples.end(), tx_.begin() + static_cast<std::ptrdiff_t>(k * R));
        const auto y = lowpass(w, cfg.M());
        std::copy(y.samples.begin(), y.samples.end(), rx_.begin() + static_cast<std::ptrdiff_t>(k * Mu));
      }
    }
  }

  std::span<const cplx> tx(const SymbolDecision& d) const {
    const auto R = static_cast<std::size_t>(cfg_.rate());
    return std::span<const cplx>(tx_).subspan(index(d) * R, R);
  }
  std::span<const cplx> rx(const SymbolDecision& d) const {
    const auto Mu = static_cast<std::size_t>(cfg_.M());
    return std::span<const cplx>(rx_).subspan(index(d) * Mu, Mu);
  }

 private:
  std::size_t index(const SymbolDecision& d) const {
    return static_cast<std::size_t>(d.alpha_index) * static_cast<std::size_t>(cfg_.M()) +
           static_cast<std::size_t>(d.beta);
  }

  GmConfig cfg_;
  std::vector<cplx> tx_;
  std::vector<cplx> rx_;
};

// Table sizes above this fall back to per-burst synthesis.
constexpr std::size_t kMaxTableSamples = std::size_t{1} << 23;

}  // namespace

SerCurve run_ser_campaign(const ExperimentConfig& exp) {
  exp.validate();
  const GmConfig cfg = exp.modem.config();
  const Detector detector(cfg);
  const int R = cfg.rate();
  const int M = cfg.M();
  const int ell = cfg.ell_sym();
  const auto Mu = static_cast<std::size_t>(M);

  std::optional<SymbolTable> table;
  const std::size_t table_samples = static_cast<std::size_t>(cfg.num_alpha()) * Mu * static_cast<std::size_t>(R);
  if (table_samples <= kMaxTableSamples) table.emplace(cfg);

  SerCurve curve;
  curve.label = exp.modem.label;
  curve.channel = exp.channel.label();
  curve.ell_sym = ell;

  for (std::size_t p = 0; p < exp.eb_n0_db.size(); ++p) {
    SerPoint pt;
    pt.eb_n0_db = exp.eb_n0_db[p];
    const std::uint64_t point_seed = derive_seed(exp.seed, p);
    for (std::uint64_t b = 0; pt.symbol_errors < exp.min_errors && pt.symbols < exp.max_symbols; ++b) {
      const auto n = static_cast<std::size_t>(std::min<long long>(exp.burst_symbols, exp.max_symbols - pt.symbols));
      const std::uint64_t burst_seed = derive_seed(point_seed, b);

      std::mt19937_64 rng(derive_seed(burst_seed, 0));
      std::uniform_int_distribution<int> pick_alpha(0, cfg.num_alpha() - 1);
      std::uniform_int_distribution<int> pick_beta(0, M - 1);
      std::vector<SymbolDecision> tx(n);
      for (auto& s : tx) {
        s.alpha_index = pick_alpha(rng);
        s.beta = pick_beta(rng);
      }

      const auto ch = exp.channel.draw(derive_seed(burst_seed, 1));
      const bool scalar = ch.taps.size() == 1 && ch.taps.front().delay_chips == 0.0;

      // Chip-rate signal after the front end. The lowpass is linear, so a
      // single zero-delay tap commutes with it.
      SampledWaveform front;
      if (scalar && table) {
        const cplx g = ch.taps.front().gain;
        front.rate = M;
        front.samples.reserve(n * Mu);
        for (const auto& s : tx) {
          for (const auto& v : table->rx(s)) front.samples.push_back(g * v);
        }
      } else {
        SampledWaveform w;
        if (table) {
          w.rate = R;
          w.samples.reserve(n * static_cast<std::size_t>(R));
          for (const auto& s : tx) {
            const auto sym = table->tx(s);
            w.samples.insert(w.samples.end(), sym.begin(), sym.end());
          }
        } else {
          w = transmit(tx, cfg);
        }
        w = apply(w, ch, M);
        w.samples.resize(n * static_cast<std::size_t>(R));
        front = lowpass(w, M);
      }
      // White noise through the ideal front end stays white with variance
      // N0 * M per chip, so it is drawn directly at the chip rate.
      front = awgn(front, {pt.eb_n0_db, ell}, derive_seed(burst_seed, 2));
      std::vector<SymbolDecision> rx;
      if (exp.receiver == Receiver::kDft) {
        rx = detector.demodulate(front);
      } else {
        const ChannelMatchedDetector cm(cfg, ch);
        rx.reserve(n);
        for (std::size_t k = 0; k < n; ++k) rx.push_back(cm.detect(front.samples, k * Mu).decision);
      }

      const auto tx_bits = demap(tx, cfg);
      const auto rx_bits = demap(rx, cfg);
      for (std::size_t i = 0; i < n; ++i) {
        if (!(tx[i] == rx[i])) ++pt.symbol_errors;
      }
      for (std::size_t i = 0; i < tx_bits.size(); ++i) {
        if (tx_bits[i] != rx_bits[i]) ++pt.bit_errors;
      }
      pt.symbols += static_cast<long long>(n);
    }
    pt.ser = static_cast<double>(pt.symbol_errors) / static_cast<double>(pt.symbols);
    const long long nbits = pt.symbols * ell;
    pt.ber = static_cast<double>(pt.bit_errors) / static_cast<double>(nbits);
    pt.ser_ci = wilson_interval(pt.symbol_errors, pt.symbols);
    pt.ber_ci = wilson_interval(pt.bit_errors, nbits);
    curve.points.push_back(pt);
  }
  return curve;
}

double required_eb_n0(const SerCurve& curve, double target) {
  if (!(target > 0.0 && target < 1.0)) throw ConfigError("target error rate must be in (0, 1)");
  auto level = [](const SerPoint& p) {
    const double s = p.symbol_errors > 0 ? p.ser : 0.5 / static_cast<double>(p.symbols);
    return std::log10(s);
  };
  const auto& pts = curve.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].ser > target) continue;
    if (i == 0) {
      throw InfeasibleError("target error rate already met at the lowest Eb/N0 of " + curve.label);
    }
    const auto& a = pts[i - 1];
    const auto& b = pts[i];
    if (std::isinf(b.eb_n0_db)) return a.eb_n0_db;
    const double la = level(a);
    const double lb = level(b);
    const double lt = std::log10(target);
    if (la == lb) return b.eb_n0_db;
    return a.eb_n0_db + (lt - la) / (lb - la) * (b.eb_n0_db - a.eb_n0_db);
  }
  throw InfeasibleError("target error rate not reached within the Eb/N0 grid for " + curve.label);
}

void SweepConfig::validate() const {
  if (modems.empty() || channels.empty()) throw ConfigError("sweep needs at least one modem and one channel");
  for (const auto& m : modems) {
    for (const auto& ch : channels) (void)m.for_channel(ch).config();
  }
  validate_common(eb_n0_db, min_errors, max_symbols, burst_symbols);
  if (!(target_ser > 0.0 && target_ser < 1.0)) throw ConfigError("target_ser must be in (0, 1)");
  if (!(w_pass_factor >= 1.0)) throw ConfigError("w_pass_factor must be at least 1");
}

SweepConfig SweepConfig::from_json(const nlohmann::json& j) {
  try {
    SweepConfig s;
    for (const auto& m : j.at("modems")) s.modems.push_back(parse_modem(m));
    for (const auto& c : j.at("channels")) s.channels.push_back(ChannelPreset::parse(c.get<std::string>()));
    s.eb_n0_db = parse_grid(j.at("eb_n0_db"));
    s.min_errors = json_value_checked<long long>(j, "min_errors", s.min_errors);
    s.max_symbols = json_value_checked<long long>(j, "max_symbols", s.max_symbols);
    s.burst_symbols = json_value_checked<int>(j, "burst_symbols", s.burst_symbols);
    s.seed = json_value_checked<std::uint64_t>(j, "seed", s.seed);
    s.target_ser = json_value_checked<double>(j, "target_ser", s.target_ser);
    s.w_pass_factor = json_value_checked<double>(j, "w_pass_factor", s.w_pass_factor);
    s.receiver = parse_receiver(json_value_checked<std::string>(j, "receiver", "dft"));
    s.out = json_value_checked<std::string>(j, "out", s.out);
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("sweep config: ") + ex.what());
  }
}

nlohmann::json SweepConfig::to_json() const {
  nlohmann::json ms = nlohmann::json::array();
  for (const auto& m : modems) ms.push_back(modem_json(m));
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : channels) cs.push_back(c.label());
  nlohmann::json grid = nlohmann::json::array();
  for (double v : eb_n0_db) grid.push_back(db_to_json(v));
  return {{"modems", ms},
          {"channels", cs},
          {"eb_n0_db", grid},
          {"min_errors", min_errors},
          {"max_symbols", max_symbols},
          {"burst_symbols", burst_symbols},
          {"seed", seed},
          {"target_ser", target_ser},
          {"w_pass_factor", w_pass_factor},
          {"receiver", receiver_name(receiver)},
          {"out", out}};
}

SweepResult efficiency_sweep(const SweepConfig& sweep) {
  sweep.validate();
  SweepResult res;
  for (const auto& ch : sweep.channels) {
    for (const auto& m : sweep.modems) {
      ExperimentConfig e;
      e.modem = m.for_channel(ch);
      e.channel = ch;
      e.eb_n0_db = sweep.eb_n0_db;
      e.min_errors = sweep.min_errors;
      e.max_symbols = sweep.max_symbols;
      e.burst_symbols = sweep.burst_symbols;
      e.seed = sweep.seed;
      e.receiver = sweep.receiver;
      auto curve = run_ser_campaign(e);

      const auto cfg = e.modem.config();
      const auto re = resource_efficiency(cfg, sweep.w_pass_factor * cfg.M());
      EfficiencyPoint pt;
      pt.label = m.label;
      pt.channel = ch.label();
      pt.eta = re.eta;
      pt.u = re.u;
      pt.eps_db = required_eb_n0(curve, sweep.target_ser);
      for (const auto& sp : curve.points) {
        if (sp.ser <= sweep.target_ser) {
          pt.achieved_ser = sp.ser;
          break;
        }
      }
      pt.shannon_db = shannon_bound(re.eta).db;
      res.points.push_back(pt);
      res.curves.push_back(std::move(curve));
    }
  }
  return res;
}

std::string config_hash(const nlohmann::json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gm
