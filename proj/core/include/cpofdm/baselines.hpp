#pragma once

// Reference systems processed by matched filtering:
//  - shared-band polyphase codes, all transmitters in the same band;
//  - frequency-division LFM, modelled as ideally separated bands, i.e. one
//    decoupled single-transmitter channel per (receiver, transmitter) pair.
// Both suffer range sidelobes (IRCI); the shared-band codes also suffer
// cross-correlation between transmitters (ITI).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cpofdm/dsp.hpp"
#include "cpofdm/scene.hpp"
#include "cpofdm/tensor.hpp"

namespace cpofdm::baselines {

struct CodeSet {
    std::string label;
    std::vector<ComplexSeq> codes;  // one unit-modulus code per transmitter

    std::size_t num_tx() const { return codes.size(); }
    std::size_t length() const { return codes.empty() ? 0 : codes.front().size(); }
    // Throws std::invalid_argument on ragged rows or |chip| != 1 (1e-12).
    void validate() const;
};

// phi_n = pi (n-1)(n-1-N)/N, n = 1..N
ComplexSeq p4_code(std::size_t length);
// Transmitter 0: P4, transmitter 1: its conjugate (opposite chirp), further
// transmitters: seeded random polyphase codes.
CodeSet p4_code_set(std::size_t num_tx, std::size_t length, std::uint64_t seed);

// exp(j pi kappa n^2 / N), scaled to unit energy.
ComplexSeq lfm_pulse(std::size_t length, double kappa = 1.0);

// Aperiodic autocorrelation r[l] = sum_n x[n+l] conj(x[n]), l = -(N-1) .. N-1.
ComplexSeq autocorrelation(std::span<const cplx> x);
// 20 log10(|r[0]| / max_{l != 0} |r[l]|)
double peak_sidelobe_ratio_db(std::span<const cplx> x);

// Codes scaled so every pulse carries energy 1/(T P).
std::vector<ComplexSeq> transmit_pulses(const CodeSet& set, std::size_t num_pulses);

// Received streams [beta * P + p] of length L + eta_max + M - 1 for pulses that
// repeat the same code every slot. Noise: CN(0, sigma_n2) seeded with
// derive_seed(noise_seed, {beta, p}).
std::vector<ComplexSeq> synthesize_code_streams(std::span<const ComplexSeq> pulses, const RcsRealization& rcs,
                                                const SceneConfig& scene, std::size_t num_pulses,
                                                double sigma_n2, std::uint64_t noise_seed);

// For every (beta, alpha, m): sum_p sum_n conj(c_alpha[n]) u_beta^(p)[n + m + eta] / sum_p ||c_alpha||^2.
// A lone target seen through an ideal code returns d exactly.
Tensor3<cplx> matched_filter_range(std::span<const ComplexSeq> streams, std::span<const ComplexSeq> pulses,
                                   const SceneConfig& scene, std::size_t num_pulses);

// Shared-band run of a code set: synthesize + matched filter, returns d estimates.
Tensor3<cplx> code_set_simulate(const CodeSet& set, const SceneConfig& scene, const RcsRealization& rcs,
                                std::size_t num_pulses, std::uint64_t noise_seed);

struct LfmConfig {
    std::size_t length = 40;
    double kappa = 1.0;
};

// Each (beta, alpha) pair sees only its own LFM pulse in its own band with
// noise CN(0, sigma_n2) seeded by derive_seed(noise_seed, {beta, p, alpha}).
// Needs T times the bandwidth of the shared-band systems. Returns d estimates.
Tensor3<cplx> fd_lfm_simulate(const SceneConfig& scene, const RcsRealization& rcs, LfmConfig lfm,
                              std::size_t num_pulses, std::uint64_t noise_seed);

// d estimates -> g estimates (no sqrt(N) gain involved).
Tensor3<cplx> compensate_baseline(const Tensor3<cplx>& d_est, const Tensor3<double>& tau_sum, double carrier_hz);

// CSV: one row per transmitter, comma-separated phases in radians. Blank lines
// and lines starting with '#' are skipped.
CodeSet read_code_set(std::istream& in, const std::string& label);
CodeSet load_code_set(const std::filesystem::path& path);
void write_code_set(std::ostream& out, const CodeSet& set);
void save_code_set(const std::filesystem::path& path, const CodeSet& set);

}  // namespace cpofdm::baselines
