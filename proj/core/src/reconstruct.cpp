#include "cpofdm/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/SVD>

#include "cpofdm/cod.hpp"

namespace cpofdm {

ComplexSeq trim_and_demodulate(std::span<const cplx> stream, const PulseLayout& layout) {
    if (stream.size() != layout.frame_length()) {
        std::ostringstream msg;
        msg << "trim_and_demodulate: stream has " << stream.size() << " samples, expected N + 2(eta_max + M) - 2 = "
            << layout.frame_length();
        throw std::invalid_argument(msg.str());
    }
    return dsp::dft_unitary(stream.subspan(layout.cp_length(), layout.num_subcarriers));
}

SubcarrierObservations build_observations(const ReceivedFrame& frame, const PulseLayout& layout) {
    const std::size_t n = layout.num_subcarriers;
    SubcarrierObservations obs;
    obs.u.assign(n, Eigen::MatrixXcd(frame.num_rx, frame.num_pulses));
    for (std::size_t b = 0; b < frame.num_rx; ++b) {
        for (std::size_t p = 0; p < frame.num_pulses; ++p) {
            const ComplexSeq spec = trim_and_demodulate(frame.stream(b, p), layout);
            for (std::size_t k = 0; k < n; ++k) {
                obs.u[k](static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(p)) = spec[k];
            }
        }
    }
    return obs;
}

namespace {

std::string rank_message(std::size_t k, double ratio) {
    std::ostringstream msg;
    msg << "S_k is rank deficient at subcarrier k=" << k << " (sigma_min/sigma_max=" << ratio
        << "); the waveform set cannot separate the transmitters";
    return msg.str();
}

bool is_flat_unitary(const WaveformSet& ws) {
    double scale = 0.0;
    for (std::size_t a = 0; a < ws.num_tx(); ++a) {
        for (double v : ws.total_power_profile(a)) scale = std::max(scale, v);
    }
    if (!(scale > 0.0)) return false;
    return cod::verify_flat_unitary(ws) <= 1e-9 * scale;
}

}  // namespace

RankDeficientError::RankDeficientError(std::size_t subcarrier, double ratio)
    : std::invalid_argument(rank_message(subcarrier, ratio)), subcarrier_(subcarrier) {}

TransmitterSeparator::TransmitterSeparator(const WaveformSet& ws, SeparationPath path) {
    const std::size_t n = ws.num_subcarriers();
    const auto t = static_cast<Eigen::Index>(ws.num_tx());
    if (ws.num_tx() > ws.num_pulses()) {
        throw std::invalid_argument("separate_transmitters: T > P, S_k can never have full row rank");
    }
    inverse_.reserve(n);
    std::vector<Eigen::MatrixXcd> mats;
    mats.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        Eigen::MatrixXcd s = ws.subcarrier_matrix(k);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s);
        const auto& sv = svd.singularValues();
        const double smax = sv(0);
        const double smin = sv(t - 1);
        if (!(smax > 0.0) || !(smin > kRankTolerance * smax)) {
            throw RankDeficientError(k, smax > 0.0 ? smin / smax : 0.0);
        }
        mats.push_back(std::move(s));
    }

    const bool flat = path != SeparationPath::general && is_flat_unitary(ws);
    if (path == SeparationPath::fast && !flat) {
        throw std::invalid_argument("separate_transmitters: fast path requested but S_k is not flat-unitary");
    }
    fast_ = flat;
    for (const auto& s : mats) {
        if (fast_) {
            const double c = s.rowwise().squaredNorm().mean();
            inverse_.push_back(s.adjoint() / c);
        } else {
            const Eigen::MatrixXcd gram = s * s.adjoint();
            // S^H (S S^H)^-1 = ((S S^H)^-1 S)^H since the Gram matrix is Hermitian.
            inverse_.push_back(gram.ldlt().solve(s).adjoint());
        }
    }
}

std::vector<Eigen::MatrixXcd> TransmitterSeparator::apply(const SubcarrierObservations& obs) const {
    if (obs.u.size() != inverse_.size()) {
        throw std::invalid_argument("separate_transmitters: observation count differs from N");
    }
    std::vector<Eigen::MatrixXcd> d(obs.u.size());
    for (std::size_t k = 0; k < obs.u.size(); ++k) {
        if (obs.u[k].cols() != inverse_[k].rows()) {
            throw std::invalid_argument("separate_transmitters: observation pulse count differs from P");
        }
        d[k] = obs.u[k] * inverse_[k];
    }
    return d;
}

std::vector<Eigen::MatrixXcd> separate_transmitters(const SubcarrierObservations& obs, const WaveformSet& ws,
                                                    SeparationPath path) {
    return TransmitterSeparator(ws, path).apply(obs);
}

ComplexSeq recover_rcs(std::span<const cplx> d_hat_k, std::size_t eta, const PulseLayout& layout) {
    if (d_hat_k.size() != layout.num_subcarriers) throw std::invalid_argument("recover_rcs: expected N values");
    if (eta > layout.eta_max) throw std::invalid_argument("recover_rcs: eta exceeds eta_max");
    const ComplexSeq time = dsp::idft_unitary(d_hat_k);
    const std::size_t shift = layout.eta_max + layout.range_cells - eta - 1;
    ComplexSeq out = dsp::cyclic_shift(time, shift, dsp::ShiftDirection::right);
    out.resize(layout.range_cells);
    return out;
}

Tensor3<cplx> phase_compensate(const Tensor3<cplx>& d_hat, const Tensor3<double>& tau_sum, double carrier_hz,
                               std::size_t num_subcarriers) {
    if (d_hat.dim0() != tau_sum.dim0() || d_hat.dim1() != tau_sum.dim1() || d_hat.dim2() != tau_sum.dim2()) {
        throw std::invalid_argument("phase_compensate: tau_sum shape differs from d_hat");
    }
    const double inv_root = 1.0 / std::sqrt(static_cast<double>(num_subcarriers));
    Tensor3<cplx> g(d_hat.dim0(), d_hat.dim1(), d_hat.dim2());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.data()[i] = d_hat.data()[i] * inv_root * std::conj(carrier_phase(carrier_hz, tau_sum.data()[i]));
    }
    return g;
}

RangeEstimate reconstruct_all(const ReceivedFrame& frame, const WaveformSet& ws, const SceneConfig& scene,
                              const TransmitterSeparator& separator) {
    scene.validate();
    const PulseLayout& layout = ws.layout();
    if (frame.num_rx != scene.num_rx || frame.num_pulses != ws.num_pulses() || ws.num_tx() != scene.num_tx) {
        throw std::invalid_argument("reconstruct: frame, waveform set and scene dimensions disagree");
    }
    if (layout.range_cells != scene.range_cells || layout.eta_max != scene.eta_max) {
        throw std::invalid_argument("reconstruct: waveform layout (M, eta_max) differs from the scene");
    }
    const auto obs = build_observations(frame, layout);
    const auto d = separator.apply(obs);

    const std::size_t n = layout.num_subcarriers;
    RangeEstimate est;
    est.d_hat = Tensor3<cplx>(scene.num_rx, scene.num_tx, scene.range_cells);
    ComplexSeq column(n);
    for (std::size_t b = 0; b < scene.num_rx; ++b) {
        for (std::size_t a = 0; a < scene.num_tx; ++a) {
            for (std::size_t k = 0; k < n; ++k) {
                column[k] = d[k](static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
            }
            const ComplexSeq r = recover_rcs(column, scene.eta[b][a], layout);
            for (std::size_t m = 0; m < scene.range_cells; ++m) est.d_hat(b, a, m) = r[m];
        }
    }
    est.g_hat = phase_compensate(est.d_hat, scene.tau_sum(), scene.carrier_hz, n);
    return est;
}

RangeEstimate reconstruct_all(const ReceivedFrame& frame, const WaveformSet& ws, const SceneConfig& scene,
                              SeparationPath path) {
    return reconstruct_all(frame, ws, scene, TransmitterSeparator(ws, path));
}

EstimateScore score_estimate(const Tensor3<cplx>& g_hat, const Tensor3<cplx>& g,
                             const std::vector<std::size_t>& target_cells) {
    if (g_hat.dim0() != g.dim0() || g_hat.dim1() != g.dim1() || g_hat.dim2() != g.dim2()) {
        throw std::invalid_argument("score_estimate: shapes differ");
    }
    EstimateScore score;
    double g_peak = 0.0;
    double err_peak = 0.0;
    double total = 0.0;
    for (std::size_t b = 0; b < g.dim0(); ++b) {
        for (std::size_t a = 0; a < g.dim1(); ++a) {
            PairScore ps;
            ps.beta = b;
            ps.alpha = a;
            for (std::size_t m = 0; m < g.dim2(); ++m) {
                const double e = std::abs(g_hat(b, a, m) - g(b, a, m));
                ps.mse += e * e;
                ps.max_abs_error = std::max(ps.max_abs_error, e);
                g_peak = std::max(g_peak, std::abs(g(b, a, m)));
            }
            total += ps.mse;
            ps.mse /= static_cast<double>(g.dim2());
            for (std::size_t m : target_cells) ps.signal_power += std::norm(g(b, a, m));
            if (!target_cells.empty()) ps.signal_power /= static_cast<double>(target_cells.size());
            ps.empirical_snr_db = ps.mse > 0.0 ? 10.0 * std::log10(ps.signal_power / ps.mse)
                                               : std::numeric_limits<double>::infinity();
            err_peak = std::max(err_peak, ps.max_abs_error);
            score.pairs.push_back(ps);
        }
    }
    score.mse = g.size() ? total / static_cast<double>(g.size()) : 0.0;
    score.max_relative_error = g_peak > 0.0 ? err_peak / g_peak : err_peak;
    return score;
}

namespace {

void require_noise(double sigma_n2) {
    if (!(sigma_n2 > 0.0)) throw std::invalid_argument("SNR: noise variance must be > 0");
}

}  // namespace

double snr_post_theory_db(double d_power, std::span<const double> power_profile, double sigma_n2) {
    require_noise(sigma_n2);
    if (power_profile.empty()) throw std::invalid_argument("SNR: empty power profile");
    double inv = 0.0;
    for (double pk : power_profile) {
        if (!(pk > 0.0)) return -std::numeric_limits<double>::infinity();
        inv += 1.0 / pk;
    }
    const double n = static_cast<double>(power_profile.size());
    return 10.0 * std::log10(n * n * d_power / (sigma_n2 * inv));
}

double snr_max_theory_db(double d_power, std::size_t num_tx, double sigma_n2) {
    require_noise(sigma_n2);
    return 10.0 * std::log10(d_power / (static_cast<double>(num_tx) * sigma_n2));
}

double snr_pre_theory_db(double d_power, std::size_t nonzero_length, std::size_t num_tx, std::size_t num_nonzero,
                         double sigma_n2) {
    require_noise(sigma_n2);
    const double denom = static_cast<double>(nonzero_length * num_tx * num_nonzero) * sigma_n2;
    return 10.0 * std::log10(d_power / denom);
}

void write_estimate_csv(std::ostream& out, const Tensor3<cplx>& g_hat) {
    out << "beta,alpha,m,re,im,abs\n" << std::setprecision(17);
    for (std::size_t b = 0; b < g_hat.dim0(); ++b) {
        for (std::size_t a = 0; a < g_hat.dim1(); ++a) {
            for (std::size_t m = 0; m < g_hat.dim2(); ++m) {
                const cplx v = g_hat(b, a, m);
                out << b << ',' << a << ',' << m << ',' << v.real() << ',' << v.imag() << ',' << std::abs(v) << '\n';
            }
        }
    }
}

}  // namespace cpofdm
