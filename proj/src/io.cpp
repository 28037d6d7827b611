#include "gm/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "gm/error.hpp"

namespace gm::io {

namespace {

void header(std::ostream& os, const Meta& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
}

std::string fmt_db(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

}  // namespace

void write_waveform(std::ostream& os, const SampledWaveform& w, const Meta& meta) {
  header(os, meta);
  os << "# rate=" << w.rate << '\n';
  os << "index,re,im\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < w.size(); ++i) {
    os << i << ',' << w.samples[i].real() << ',' << w.samples[i].imag() << '\n';
  }
}

SampledWaveform read_waveform(std::istream& is, int default_rate) {
  SampledWaveform w;
  w.rate = default_rate;
  std::string line;
  std::size_t expected = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("rate=");
      if (pos != std::string::npos && line.find_first_not_of("# ") == pos) {
        try {
          w.rate = std::stoi(line.substr(pos + 5));
        } catch (const std::exception&) {
          throw ConfigError("bad rate line: " + line);
        }
      }
      continue;
    }
    if (line.rfind("index", 0) == 0) continue;
    std::istringstream row(line);
    std::size_t idx = 0;
    double re = 0.0, im = 0.0;
    char c1 = 0, c2 = 0;
    if (!(row >> idx >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',') {
      throw ConfigError("malformed waveform row: " + line);
    }
    if (idx != expected) throw ConfigError("waveform rows must be consecutive from 0");
    ++expected;
    w.samples.emplace_back(re, im);
  }
  if (w.rate < 1) throw ConfigError("waveform rate must be positive");
  return w;
}

void write_channel(std::ostream& os, const ChannelRealization& ch, const Meta& meta) {
  header(os, meta);
  os << "# rms_delay_spread_chips=" << ch.rms_delay_spread_chips << '\n';
  os << "tap,delay_chips,power,gain_re,gain_im\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < ch.taps.size(); ++i) {
    const auto& t = ch.taps[i];
    os << i << ',' << t.delay_chips << ',' << t.power << ',' << t.gain.real() << ',' << t.gain.imag() << '\n';
  }
}

void write_spectrum(std::ostream& os, const SpectrumEstimate& s, const Meta& meta) {
  header(os, meta);
  os << "# M=" << s.M << "\n# rate=" << s.rate << "\n# trials=" << s.trials << "\n# zero_pad=" << s.zero_pad
     << '\n';
  os << std::setprecision(12);
  os << "# total_power=" << s.total_power << "\n# oow=" << s.oow << '\n';
  os << "zeta,p_cont,p_cont_se,p_disc\n";
  // line power sits on the integer frequencies of the fine grid
  const int half = s.rate / 2;
  for (std::size_t k = 0; k < s.bin_freqs.size(); ++k) {
    const double z = s.bin_freqs[k];
    double disc = 0.0;
    if (z == std::floor(z)) {
      const long j = static_cast<long>(z) + half;
      if (j >= 0 && j < static_cast<long>(s.p_disc.size())) disc = s.p_disc[static_cast<std::size_t>(j)];
    }
    os << z << ',' << s.p_cont[k] << ',' << s.p_cont_se[k] << ',' << disc << '\n';
  }
}

void write_ser_curves(std::ostream& os, const std::vector<SerCurve>& curves, const Meta& meta) {
  header(os, meta);
  os << "label,channel,ell_sym,eb_n0_db,symbols,symbol_errors,ser,ser_lo,ser_hi,bit_errors,ber,ber_lo,ber_hi\n";
  os << std::setprecision(10);
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      os << c.label << ',' << c.channel << ',' << c.ell_sym << ',' << fmt_db(p.eb_n0_db) << ',' << p.symbols << ','
         << p.symbol_errors << ',' << p.ser << ',' << p.ser_ci.lo << ',' << p.ser_ci.hi << ',' << p.bit_errors << ','
         << p.ber << ',' << p.ber_ci.lo << ',' << p.ber_ci.hi << '\n';
    }
  }
}

void write_efficiency(std::ostream& os, const std::vector<EfficiencyPoint>& pts, const Meta& meta) {
  header(os, meta);
  os << "label,channel,eta,u,eps_db,achieved_ser,shannon_db\n";
  os << std::setprecision(10);
  for (const auto& p : pts) {
    os << p.label << ',' << p.channel << ',' << p.eta << ',' << p.u << ',' << p.eps_db << ',' << p.achieved_ser << ','
       << p.shannon_db << '\n';
  }
}

void write_tolerance(std::ostream& os, const std::vector<TolerancePoint>& chirp,
                     const std::vector<TolerancePoint>& tone, const Meta& meta) {
  if (chirp.size() != tone.size()) throw ConfigError("tolerance curves must share the offset grid");
  header(os, meta);
  os << "delta,chirp_peak,chirp_lag,tone_peak,tone_lag\n";
  os << std::setprecision(12);
  for (std::size_t i = 0; i < chirp.size(); ++i) {
    os << chirp[i].offset << ',' << chirp[i].peak << ',' << chirp[i].best_lag << ',' << tone[i].peak << ','
       << tone[i].best_lag << '\n';
  }
}

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

}  // namespace gm::io
