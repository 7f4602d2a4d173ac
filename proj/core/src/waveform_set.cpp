#include "cpofdm/waveform_set.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cpofdm {

WaveformSet::WaveformSet(PulseLayout layout, std::size_t num_tx, std::size_t num_pulses, std::size_t num_nonzero,
                         std::vector<ComplexSeq> freq_weights)
    : layout_(layout), num_tx_(num_tx), num_pulses_(num_pulses), num_nonzero_(num_nonzero),
      freq_(std::move(freq_weights)) {
    layout_.validate();
    if (num_tx_ == 0 || num_pulses_ == 0) throw std::invalid_argument("WaveformSet: empty transmitter/pulse grid");
    if (num_nonzero_ == 0 || num_nonzero_ > num_pulses_) {
        throw std::invalid_argument("WaveformSet: non-zero pulse count must lie in [1, P]");
    }
    if (freq_.size() != num_tx_ * num_pulses_) {
        std::ostringstream msg;
        msg << "WaveformSet: expected " << num_tx_ * num_pulses_ << " sequences, got " << freq_.size();
        throw std::invalid_argument(msg.str());
    }
    time_.reserve(freq_.size());
    for (const auto& f : freq_) {
        if (f.size() != layout_.num_subcarriers) {
            throw std::invalid_argument("WaveformSet: sequence length differs from N");
        }
        if (!dsp::all_finite(f)) throw std::invalid_argument("WaveformSet: non-finite weight");
        time_.push_back(dsp::idft_unitary(f));
    }
}

Eigen::MatrixXcd WaveformSet::subcarrier_matrix(std::size_t k) const {
    Eigen::MatrixXcd s(num_tx_, num_pulses_);
    for (std::size_t a = 0; a < num_tx_; ++a) {
        for (std::size_t p = 0; p < num_pulses_; ++p) s(a, p) = freq(a, p).at(k);
    }
    return s;
}

std::vector<double> WaveformSet::total_power_profile(std::size_t alpha) const {
    std::vector<double> profile(num_subcarriers(), 0.0);
    for (std::size_t p = 0; p < num_pulses_; ++p) {
        const auto& f = freq(alpha, p);
        for (std::size_t k = 0; k < f.size(); ++k) profile[k] += std::norm(f[k]);
    }
    return profile;
}

double WaveformSet::pulse_energy(std::size_t alpha, std::size_t p) const { return dsp::energy(freq(alpha, p)); }

bool WaveformSet::is_zero_pulse(std::size_t alpha, std::size_t p) const {
    const auto& f = freq(alpha, p);
    return std::all_of(f.begin(), f.end(), [](const cplx& v) { return v == cplx{}; });
}

cplx WaveformSet::transmitted_sample(std::size_t alpha, std::size_t p, std::ptrdiff_t i) const {
    if (i < 0 || i >= static_cast<std::ptrdiff_t>(layout_.transmit_length())) return {};
    const auto& t = time(alpha, p);
    return t[static_cast<std::size_t>(i) % t.size()];
}

bool WaveformSet::operator==(const WaveformSet& other) const {
    return layout_ == other.layout_ && num_tx_ == other.num_tx_ && num_pulses_ == other.num_pulses_ &&
           num_nonzero_ == other.num_nonzero_ && freq_ == other.freq_;
}

}  // namespace cpofdm
