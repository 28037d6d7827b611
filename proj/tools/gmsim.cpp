// gmsim: command-line front end for spectra, modem I/O, preamble sweeps,
// SER campaigns, efficiency sweeps and bound tables.
//
// Exit codes: 0 success, 2 configuration error, 3 infeasible request.

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gm/channel.hpp"
#include "gm/correlation.hpp"
#include "gm/error.hpp"
#include "gm/experiment.hpp"
#include "gm/io.hpp"
#include "gm/modem.hpp"
#include "gm/preamble.hpp"
#include "gm/spectrum.hpp"

using nlohmann::json;

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Master RNG seed");
  sub->add_option("--out", c.out, "Output CSV path (summary JSON goes next to it); stdout when omitted");
  sub->add_option("--config", c.config, "JSON configuration file");
}

json load_json(const std::string& path) {
  try {
    return json::parse(gm::io::read_text(path));
  } catch (const json::parse_error& e) {
    throw gm::ConfigError(path + ": " + e.what());
  }
}

// Fills `var` from the JSON config unless the flag was given explicitly.
template <typename T>
void from_config(const json& j, CLI::App* sub, const std::string& key, T& var) {
  if (!j.contains(key)) return;
  if (sub->get_option("--" + key)->count() > 0) return;
  try {
    var = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw gm::ConfigError("config key " + key + ": " + e.what());
  }
}

std::string summary_path(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension(".json");
  return p.string();
}

// Writes the CSV produced by `emit` and the summary JSON.
template <typename Emit>
void emit_outputs(const Common& c, const json& summary, Emit&& emit) {
  if (c.out.empty()) {
    emit(std::cout);
    std::cerr << summary.dump(2) << '\n';
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw gm::ConfigError("cannot write " + c.out);
  emit(f);
  gm::io::write_text(summary_path(c.out), summary.dump(2) + "\n");
}

gm::io::Meta meta_for(const json& cfg, std::uint64_t seed) {
  return {{"config_hash", gm::config_hash(cfg)}, {"seed", std::to_string(seed)}};
}

std::vector<double> alpha_set_from(int M, const std::vector<double>& explicit_set, const std::string& policy,
                                   int bits) {
  if (!explicit_set.empty()) return explicit_set;
  return gm::alpha_set_for_policy(M, policy, bits);
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  int M = 128;
  int oversample = 8;
  std::string alpha = "0";  // a number, or "uniform" over --alpha-set
  std::vector<double> alpha_set;
  int psk = 1;
  int trials = 4096;
  int zero_pad = 8;
  std::string mask;
};

int run_spectrum(CLI::App* sub, SpectrumArgs a, Common c) {
  if (!c.config.empty()) {
    const auto j = load_json(c.config);
    from_config(j, sub, "M", a.M);
    from_config(j, sub, "oversample", a.oversample);
    from_config(j, sub, "alpha", a.alpha);
    from_config(j, sub, "alpha-set", a.alpha_set);
    from_config(j, sub, "psk", a.psk);
    from_config(j, sub, "trials", a.trials);
    from_config(j, sub, "zero-pad", a.zero_pad);
    from_config(j, sub, "mask", a.mask);
    from_config(j, sub, "seed", c.seed);
    from_config(j, sub, "out", c.out);
  }
  gm::AlphaPolicy policy;
  std::vector<double> set;
  if (a.alpha == "uniform") {
    set = a.alpha_set.empty() ? gm::select_alpha_subset(a.M, gm::AlphaSelection::kSmallestMagnitude) : a.alpha_set;
    policy = gm::AlphaPolicy::uniform();
  } else {
    double v = 0.0;
    try {
      v = std::stod(a.alpha);
    } catch (const std::exception&) {
      throw gm::ConfigError("--alpha must be a number or \"uniform\"");
    }
    set = {v};
    policy = gm::AlphaPolicy::fixed(v);
  }
  const gm::GmConfig cfg(a.M, set, a.oversample);
  const gm::RhoPolicy rho = a.psk > 1 ? gm::RhoPolicy::psk(a.psk) : gm::RhoPolicy::constant();
  gm::PsdOptions opts;
  opts.trials = a.trials;
  opts.seed = c.seed;
  opts.zero_pad = a.zero_pad;

  const json cfg_json = {{"M", a.M},         {"oversample", a.oversample}, {"alpha", a.alpha},
                         {"alpha_set", set}, {"psk", a.psk},               {"trials", a.trials},
                         {"zero_pad", a.zero_pad}, {"mask", a.mask},       {"seed", c.seed}};
  const auto spec = gm::estimate_psd(cfg, policy, opts, rho);

  json summary = {{"config", cfg_json},
                  {"config_hash", gm::config_hash(cfg_json)},
                  {"seed", c.seed},
                  {"oow", spec.oow},
                  {"total_power", spec.total_power},
                  {"mean_energy", spec.mean_energy}};
  if (!a.mask.empty()) {
    int ell = cfg.m();
    if (policy.kind == gm::AlphaPolicy::Kind::kUniform) ell += cfg.n();
    if (a.psk > 1) ell += gm::log2_exact(a.psk);
    const auto rate = gm::max_symbol_rate(spec, ell, gm::EmissionMask::load(a.mask));
    summary["ell_sym"] = ell;
    summary["w_sym"] = rate.w_sym;
    summary["r_b"] = rate.r_b;
  }
  emit_outputs(c, summary, [&](std::ostream& os) { gm::io::write_spectrum(os, spec, meta_for(cfg_json, c.seed)); });
  return 0;
}

// ------------------------------------------------------------------- modem

struct ModemArgs {
  int M = 8;
  std::vector<double> alpha_set;
  std::string alpha_policy = "zero";
  int oversample = 1;
  std::string bits;
  std::string hex;
  std::string in;
};

std::vector<std::uint8_t> parse_bits(const ModemArgs& a) {
  std::vector<std::uint8_t> bits;
  if (!a.hex.empty()) {
    for (char ch : a.hex) {
      int v = 0;
      if (ch >= '0' && ch <= '9') {
        v = ch - '0';
      } else if (ch >= 'a' && ch <= 'f') {
        v = ch - 'a' + 10;
      } else if (ch >= 'A' && ch <= 'F') {
        v = ch - 'A' + 10;
      } else {
        throw gm::ConfigError("invalid hex digit");
      }
      for (int k = 3; k >= 0; --k) bits.push_back(static_cast<std::uint8_t>((v >> k) & 1));
    }
    return bits;
  }
  std::string text = a.bits;
  if (text.empty() && !a.in.empty()) text = gm::io::read_text(a.in);
  for (char ch : text) {
    if (ch == '0' || ch == '1') {
      bits.push_back(static_cast<std::uint8_t>(ch - '0'));
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      throw gm::ConfigError("bit strings may only contain 0, 1 and whitespace");
    }
  }
  return bits;
}

int run_modem(CLI::App* sub, const std::string& mode, ModemArgs a, Common c) {
  if (!c.config.empty()) {
    const auto j = load_json(c.config);
    from_config(j, sub, "M", a.M);
    from_config(j, sub, "alpha-set", a.alpha_set);
    from_config(j, sub, "alpha-policy", a.alpha_policy);
    from_config(j, sub, "oversample", a.oversample);
    from_config(j, sub, "out", c.out);
  }
  const auto set = alpha_set_from(a.M, a.alpha_set, a.alpha_policy, -1);
  const gm::GmConfig cfg(a.M, set, a.oversample);
  const json cfg_json = {{"M", a.M}, {"alpha_set", set}, {"oversample", a.oversample}, {"mode", mode}};
  const auto meta = meta_for(cfg_json, c.seed);

  if (mode == "encode") {
    const auto bits = parse_bits(a);
    const auto symbols = gm::map_bits(bits, cfg);
    const auto w = gm::transmit(symbols, cfg);
    auto m = meta;
    m.emplace_back("M", std::to_string(a.M));
    m.emplace_back("symbols", std::to_string(symbols.size()));
    m.emplace_back("bits", std::to_string(bits.size()));
    if (c.out.empty()) {
      gm::io::write_waveform(std::cout, w, m);
    } else {
      std::ofstream f(c.out);
      if (!f) throw gm::ConfigError("cannot write " + c.out);
      gm::io::write_waveform(f, w, m);
    }
    return 0;
  }

  if (a.in.empty()) throw gm::ConfigError("decode needs --in <waveform.csv>");
  std::ifstream f(a.in);
  if (!f) throw gm::ConfigError("cannot open " + a.in);
  const auto w = gm::io::read_waveform(f, cfg.rate());
  if (w.rate % a.M != 0) throw gm::ConfigError("waveform rate is not a multiple of M");
  const gm::Detector det(cfg);
  const auto decisions = det.demodulate(gm::lowpass(w, a.M));
  const auto bits = gm::demap(decisions, cfg);
  std::string text;
  for (auto b : bits) text.push_back(static_cast<char>('0' + b));
  const json summary = {{"config", cfg_json},
                        {"config_hash", gm::config_hash(cfg_json)},
                        {"seed", c.seed},
                        {"symbols", decisions.size()},
                        {"bits", bits.size()}};
  emit_outputs(c, summary, [&](std::ostream& os) { os << text << '\n'; });
  return 0;
}

// ---------------------------------------------------------------- preamble

struct PreambleArgs {
  int M = 128;
  int oversample = 8;
  double alpha = 0.0;  // 0 selects alpha_p = M
  int repetitions = 8;
  double delta_max = -1.0;  // < 0 selects M/4
  int steps = 65;
};

int run_preamble(CLI::App* sub, PreambleArgs a, Common c) {
  if (!c.config.empty()) {
    const auto j = load_json(c.config);
    from_config(j, sub, "M", a.M);
    from_config(j, sub, "oversample", a.oversample);
    from_config(j, sub, "alpha", a.alpha);
    from_config(j, sub, "repetitions", a.repetitions);
    from_config(j, sub, "delta-max", a.delta_max);
    from_config(j, sub, "steps", a.steps);
    from_config(j, sub, "out", c.out);
  }
  if (a.M < 2 || a.oversample < 1 || a.steps < 2) throw gm::ConfigError("invalid preamble sweep parameters");
  const double alpha = a.alpha == 0.0 ? a.M : a.alpha;
  const double dmax = a.delta_max < 0.0 ? a.M / 4.0 : a.delta_max;
  const int rate = a.M * a.oversample;
  const auto chirp = gm::PreambleSpec::chirp(alpha, -a.M / 2.0, rate, a.repetitions);
  const auto tone = gm::PreambleSpec::tone(0.0, rate, a.repetitions);
  std::vector<double> offsets;
  for (int i = 0; i < a.steps; ++i) offsets.push_back(dmax * i / (a.steps - 1));
  const auto cc = gm::tolerance_curve(chirp, offsets);
  const auto tc = gm::tolerance_curve(tone, offsets);

  const json cfg_json = {{"M", a.M},         {"oversample", a.oversample}, {"alpha", alpha},
                         {"repetitions", a.repetitions}, {"delta_max", dmax}, {"steps", a.steps}};
  double worst_margin = 1.0;
  for (const auto& p : cc) worst_margin = std::min(worst_margin, p.peak - (1.0 - std::abs(p.offset / alpha)));
  const json summary = {{"config", cfg_json},
                        {"config_hash", gm::config_hash(cfg_json)},
                        {"seed", c.seed},
                        {"chirp_min_peak", cc.back().peak},
                        {"chirp_worst_margin_vs_overlap", worst_margin}};
  emit_outputs(c, summary, [&](std::ostream& os) { gm::io::write_tolerance(os, cc, tc, meta_for(cfg_json, c.seed)); });
  return 0;
}

// --------------------------------------------------------------- ser/sweep

int run_ser(CLI::App* sub, Common c) {
  if (c.config.empty()) throw gm::ConfigError("ser needs --config <experiment.json>");
  auto exp = gm::ExperimentConfig::from_json(load_json(c.config));
  if (sub->get_option("--seed")->count() > 0) exp.seed = c.seed;
  if (c.out.empty()) c.out = exp.out;
  exp.out = c.out;
  auto cfg_json = exp.to_json();
  cfg_json.erase("out");  // where results go is not part of the experiment
  const auto curve = gm::run_ser_campaign(exp);
  json pts = json::array();
  for (const auto& p : curve.points) {
    pts.push_back({{"eb_n0_db", std::isinf(p.eb_n0_db) ? json("inf") : json(p.eb_n0_db)},
                   {"symbols", p.symbols},
                   {"ser", p.ser},
                   {"ser_ci", {p.ser_ci.lo, p.ser_ci.hi}},
                   {"ber", p.ber}});
  }
  const json summary = {{"config", cfg_json},
                        {"config_hash", gm::config_hash(cfg_json)},
                        {"seed", exp.seed},
                        {"label", curve.label},
                        {"channel", curve.channel},
                        {"points", pts}};
  emit_outputs(c, summary,
               [&](std::ostream& os) { gm::io::write_ser_curves(os, {curve}, meta_for(cfg_json, exp.seed)); });
  return 0;
}

int run_sweep(CLI::App* sub, Common c) {
  if (c.config.empty()) throw gm::ConfigError("sweep needs --config <sweep.json>");
  auto sw = gm::SweepConfig::from_json(load_json(c.config));
  if (sub->get_option("--seed")->count() > 0) sw.seed = c.seed;
  if (c.out.empty()) c.out = sw.out;
  sw.out = c.out;
  auto cfg_json = sw.to_json();
  cfg_json.erase("out");
  const auto res = gm::efficiency_sweep(sw);
  json pts = json::array();
  bool above_bound = true;
  for (const auto& p : res.points) {
    pts.push_back({{"label", p.label},
                   {"channel", p.channel},
                   {"eta", p.eta},
                   {"eps_db", p.eps_db},
                   {"shannon_db", p.shannon_db}});
    above_bound = above_bound && p.eps_db > p.shannon_db;
  }
  const json summary = {{"config", cfg_json},
                        {"config_hash", gm::config_hash(cfg_json)},
                        {"seed", sw.seed},
                        {"target_ser", sw.target_ser},
                        {"all_above_shannon", above_bound},
                        {"points", pts}};
  const auto meta = meta_for(cfg_json, sw.seed);
  emit_outputs(c, summary, [&](std::ostream& os) { gm::io::write_efficiency(os, res.points, meta); });
  if (!c.out.empty()) {
    std::filesystem::path p(c.out);
    p.replace_extension(".curves.csv");
    std::ofstream f(p);
    if (!f) throw gm::ConfigError("cannot write " + p.string());
    gm::io::write_ser_curves(f, res.curves, meta);
  }
  return 0;
}

// ------------------------------------------------------------------- bound

int run_bound(std::vector<double> etas, Common c) {
  if (etas.empty()) {
    for (double e = 0.125; e <= 64.0; e *= std::sqrt(2.0)) etas.push_back(e);
  }
  const json cfg_json = {{"eta", etas}};
  auto write = [&](std::ostream& os) {
    for (const auto& [k, v] : meta_for(cfg_json, c.seed)) os << "# " << k << '=' << v << '\n';
    os << "eta,eps_linear,eps_db\n";
    os.precision(12);
    for (double e : etas) {
      const auto b = gm::shannon_bound(e);
      os << e << ',' << b.linear << ',' << b.db << '\n';
    }
  };
  const json summary = {{"config", cfg_json}, {"config_hash", gm::config_hash(cfg_json)}, {"seed", c.seed},
                        {"limit_db", 10.0 * std::log10(std::log(2.0))}};
  emit_outputs(c, summary, write);
  return 0;
}

// -------------------------------------------------------------------- corr

struct CorrArgs {
  std::string kind = "alpha";  // alpha | beta | delay
  int M = 128;
  double alpha = 0.0;
  double beta = 0.0;
  double from = 0.0;
  double to = 8.0;
  int steps = 161;
};

int run_corr(CorrArgs a, Common c) {
  if (a.steps < 2) throw gm::ConfigError("--steps must be at least 2");
  const json cfg_json = {{"kind", a.kind}, {"M", a.M},       {"alpha", a.alpha}, {"beta", a.beta},
                         {"from", a.from}, {"to", a.to},     {"steps", a.steps}};
  std::vector<std::pair<double, double>> rows;
  for (int i = 0; i < a.steps; ++i) {
    const double x = a.from + (a.to - a.from) * i / (a.steps - 1);
    double v = 0.0;
    if (a.kind == "alpha") {
      v = gm::xcorr_alpha(x);
    } else if (a.kind == "beta") {
      v = gm::xcorr_beta(x);
    } else if (a.kind == "delay") {
      v = gm::autocorr_delay({a.alpha, a.beta, 1.0}, a.M, x);
    } else {
      throw gm::ConfigError("--kind must be alpha, beta or delay");
    }
    rows.emplace_back(x, v);
  }
  const json summary = {{"config", cfg_json}, {"config_hash", gm::config_hash(cfg_json)}, {"seed", c.seed}};
  emit_outputs(c, summary, [&](std::ostream& os) {
    for (const auto& [k, v] : meta_for(cfg_json, c.seed)) os << "# " << k << '=' << v << '\n';
    os << "x,magnitude\n";
    os.precision(12);
    for (const auto& [x, v] : rows) os << x << ',' << v << '\n';
  });
  return 0;
}

// ----------------------------------------------------------------- channel

int run_channel(const std::string& preset, Common c) {
  const auto p = gm::ChannelPreset::parse(preset);
  const auto ch = p.draw(c.seed);
  const json cfg_json = {{"preset", p.label()}, {"seed", c.seed}};
  const auto meta = meta_for(cfg_json, c.seed);
  if (c.out.empty()) {
    gm::io::write_channel(std::cout, ch, meta);
  } else {
    std::ofstream f(c.out);
    if (!f) throw gm::ConfigError("cannot write " + c.out);
    gm::io::write_channel(f, ch, meta);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gmsim: generalized chirp modulation simulator"};
  app.require_subcommand(1);

  SpectrumArgs sa;
  Common sc;
  auto* spectrum = app.add_subcommand("spectrum", "Monte Carlo PSD, OoW and mask-limited symbol rate");
  spectrum->add_option("--M", sa.M, "Chips per symbol");
  spectrum->add_option("--oversample", sa.oversample, "Samples per chip (>= 4)");
  spectrum->add_option("--alpha", sa.alpha, "Fixed alpha, or \"uniform\" over --alpha-set");
  spectrum->add_option("--alpha-set", sa.alpha_set, "Alpha values for the uniform policy");
  spectrum->add_option("--psk", sa.psk, "PSK order for rho (1 = constant)");
  spectrum->add_option("--trials", sa.trials, "Monte Carlo symbols");
  spectrum->add_option("--zero-pad", sa.zero_pad, "Frequency samples per unit of normalized frequency");
  spectrum->add_option("--mask", sa.mask, "Emission mask file; enables the symbol-rate search");
  add_common(spectrum, sc);

  ModemArgs ma;
  Common mc;
  std::string modem_mode;
  auto* modem = app.add_subcommand("modem", "Encode bits to a waveform CSV or decode one back");
  modem->add_option("mode", modem_mode, "encode | decode")->required()->check(CLI::IsMember({"encode", "decode"}));
  modem->add_option("--M", ma.M, "Chips per symbol");
  modem->add_option("--alpha-set", ma.alpha_set, "Explicit alpha set");
  modem->add_option("--alpha-policy", ma.alpha_policy, "zero | smallest | largest | antipodal");
  modem->add_option("--oversample", ma.oversample, "Samples per chip");
  modem->add_option("--bits", ma.bits, "Bit string (encode)");
  modem->add_option("--hex", ma.hex, "Hex payload (encode)");
  modem->add_option("--in", ma.in, "Bits file (encode) or waveform CSV (decode)");
  add_common(modem, mc);

  PreambleArgs pa;
  Common pc;
  auto* preamble = app.add_subcommand("preamble", "Chirp vs tone preamble tolerance to carrier offset");
  preamble->add_option("--M", pa.M, "Chips per symbol");
  preamble->add_option("--oversample", pa.oversample, "Samples per chip");
  preamble->add_option("--alpha", pa.alpha, "Preamble chirp rate (default M)");
  preamble->add_option("--repetitions", pa.repetitions, "Repeated preamble symbols");
  preamble->add_option("--delta-max", pa.delta_max, "Largest offset in symbol-rate units (default M/4)");
  preamble->add_option("--steps", pa.steps, "Offsets in the sweep");
  add_common(preamble, pc);

  Common rc;
  auto* ser = app.add_subcommand("ser", "Monte Carlo SER/BER campaign from an experiment JSON");
  add_common(ser, rc);

  Common wc;
  auto* sweep = app.add_subcommand("sweep", "Energy/resource efficiency sweep from a sweep JSON");
  add_common(sweep, wc);

  Common bc;
  std::vector<double> etas;
  auto* bound = app.add_subcommand("bound", "Shannon-Hartley minimum Eb/N0 versus DoF per bit");
  bound->add_option("--eta", etas, "DoF per bit values");
  add_common(bound, bc);

  CorrArgs ca;
  Common cc;
  auto* corr = app.add_subcommand("corr", "Correlation magnitude sweeps");
  corr->add_option("--kind", ca.kind, "alpha | beta | delay");
  corr->add_option("--M", ca.M, "Chips per symbol (delay)");
  corr->add_option("--alpha", ca.alpha, "Symbol alpha (delay)");
  corr->add_option("--beta", ca.beta, "Symbol beta (delay)");
  corr->add_option("--from", ca.from, "Sweep start");
  corr->add_option("--to", ca.to, "Sweep end");
  corr->add_option("--steps", ca.steps, "Sweep points");
  add_common(corr, cc);

  std::string preset = "selective(8, 2)";
  Common hc;
  auto* channel = app.add_subcommand("channel", "Draw one channel realization");
  channel->add_option("--preset", preset, "awgn | flat | selective(n_taps, rms)");
  add_common(channel, hc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc_cli = app.exit(e);
    return rc_cli == 0 ? 0 : 2;
  }

  try {
    if (spectrum->parsed()) return run_spectrum(spectrum, sa, sc);
    if (modem->parsed()) return run_modem(modem, modem_mode, ma, mc);
    if (preamble->parsed()) return run_preamble(preamble, pa, pc);
    if (ser->parsed()) return run_ser(ser, rc);
    if (sweep->parsed()) return run_sweep(sweep, wc);
    if (bound->parsed()) return run_bound(etas, bc);
    if (corr->parsed()) return run_corr(ca, cc);
    if (channel->parsed()) return run_channel(preset, hc);
  } catch (const gm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const gm::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
