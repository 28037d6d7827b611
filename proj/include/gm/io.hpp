#pragma once

// CSV emission and parsing. Every writer takes a list of metadata pairs that
// are emitted as leading "# key=value" lines.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gm/channel.hpp"
#include "gm/experiment.hpp"
#include "gm/preamble.hpp"
#include "gm/spectrum.hpp"
#include "gm/waveform.hpp"

namespace gm::io {

using Meta = std::vector<std::pair<std::string, std::string>>;

// index,re,im rows; the sample rate goes into the metadata as rate=R.
void write_waveform(std::ostream& os, const SampledWaveform& w, const Meta& meta = {});

// Reads index,re,im rows. '#' lines are skipped except rate=R; a missing
// rate defaults to `default_rate`. Throws ConfigError on malformed rows.
SampledWaveform read_waveform(std::istream& is, int default_rate = 1);

void write_channel(std::ostream& os, const ChannelRealization& ch, const Meta& meta = {});
void write_spectrum(std::ostream& os, const SpectrumEstimate& s, const Meta& meta = {});
void write_ser_curves(std::ostream& os, const std::vector<SerCurve>& curves, const Meta& meta = {});
void write_efficiency(std::ostream& os, const std::vector<EfficiencyPoint>& pts, const Meta& meta = {});
void write_tolerance(std::ostream& os, const std::vector<TolerancePoint>& chirp,
                     const std::vector<TolerancePoint>& tone, const Meta& meta = {});

// Whole-file helpers; throw ConfigError when the file cannot be opened.
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace gm::io
