#pragma once

// Binary containers and CSV exports for designed waveforms.
//
// Binary layout (little-endian, IEEE-754 doubles):
//   8 bytes  magic  "CPOFDMWS" (waveform set) or "CPOFDMPF" (paraunitary factors)
//   u32      format version (1)
//   waveform set:  u64 N, T, P, P0, eta_max, M, then T*P*N (re, im) pairs
//                  ordered [alpha][p][k]
//   factors:       u64 P, N_t, N, T, L (vector count), f64 scale,
//                  P*P (re, im) of V row-major, then L*P (re, im) of v_l
//
// CSV export: header "k,alpha,p,re,im", all indices 0-based, 17 significant digits.

#include <filesystem>
#include <iosfwd>

#include "cpofdm/paraunitary.hpp"
#include "cpofdm/waveform_set.hpp"

namespace cpofdm::io {

void write_waveform_set(std::ostream& out, const WaveformSet& ws);
WaveformSet read_waveform_set(std::istream& in);
void save_waveform_set(const std::filesystem::path& path, const WaveformSet& ws);
WaveformSet load_waveform_set(const std::filesystem::path& path);

void write_waveform_csv(std::ostream& out, const WaveformSet& ws);

void write_factors(std::ostream& out, const paraunitary::ParaunitaryFactors& f);
paraunitary::ParaunitaryFactors read_factors(std::istream& in);

}  // namespace cpofdm::io
