#pragma once

// Line-oriented text form of a PulseSequence. One item per line, '#' starts a
// comment, fields are key=value pairs in any order:
//
//   init state=dd                         # or amplitudes=re:im,re:im,re:im,re:im
//   burst target=L duration=104e-9 freq=13.9e9 rabi=4.8e6 phase=-1.5707963
//   exchange duration=204e-9 J=4.902e6    # or V_M=0.41 (volts)
//   composite duration=176e-9 J=4.9e6 target=L freq=13.9e9 rabi=2.8e6 phase=0
//   idle duration=1e-6
//   vz target=R angle=0.25
//
// All quantities are SI (s, Hz, rad, V).

#include "siq/pulses.hpp"

#include <string>

namespace siq {

/// Throws ConfigError with the offending line number on malformed input.
PulseSequence parse_pulse_sequence(const std::string &text);
PulseSequence load_pulse_sequence(const std::string &path);
/// Full-precision text that parses back to an identical sequence.
std::string format_pulse_sequence(const PulseSequence &seq);

}  // namespace siq
