#include "cpofdm/paraunitary.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/QR>

#include "cpofdm/random.hpp"

namespace cpofdm::paraunitary {

std::size_t factor_count(std::size_t order, std::size_t nonzero_length) {
    if (order == 0) throw std::invalid_argument("paraunitary order P must be >= 1");
    if (nonzero_length < order) {
        std::ostringstream msg;
        msg << "non-zero length N_t=" << nonzero_length << " is shorter than P=" << order;
        throw std::invalid_argument(msg.str());
    }
    return (nonzero_length - order) / order;
}

ParaunitaryFactors random_factors(std::size_t order, std::size_t nonzero_length, std::size_t num_subcarriers,
                                  std::size_t num_tx, std::uint64_t seed) {
    const std::size_t count = factor_count(order, nonzero_length);
    if (num_subcarriers == 0 || num_tx == 0) throw std::invalid_argument("random_factors: N and T must be >= 1");

    Rng rng(seed);
    const auto p = static_cast<Eigen::Index>(order);
    Eigen::MatrixXcd gauss(p, p);
    for (Eigen::Index r = 0; r < p; ++r) {
        for (Eigen::Index c = 0; c < p; ++c) gauss(r, c) = rng.complex_normal(1.0);
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(gauss);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(p, p);
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < p; ++i) {
        const double mag = std::abs(r(i, i));
        if (mag > 0.0) q.col(i) *= r(i, i) / mag;
    }

    ParaunitaryFactors f;
    f.order = order;
    f.nonzero_length = nonzero_length;
    f.num_subcarriers = num_subcarriers;
    f.num_tx = num_tx;
    f.unitary = std::move(q);
    f.vectors.reserve(count);
    for (std::size_t l = 0; l < count; ++l) {
        Eigen::VectorXcd v(p);
        for (Eigen::Index i = 0; i < p; ++i) v(i) = rng.complex_normal(1.0);
        v.normalize();
        f.vectors.push_back(std::move(v));
    }
    f.scale = 1.0 / std::sqrt(static_cast<double>(num_subcarriers * num_tx * order));
    return f;
}

PolyphaseMatrix::PolyphaseMatrix(std::vector<Eigen::MatrixXcd> taps) : taps_(std::move(taps)) {
    if (taps_.empty()) throw std::invalid_argument("PolyphaseMatrix: no taps");
    const auto n = taps_.front().rows();
    for (const auto& t : taps_) {
        if (t.rows() != n || t.cols() != n) throw std::invalid_argument("PolyphaseMatrix: taps must be square");
    }
}

ComplexSeq PolyphaseMatrix::coefficients(std::size_t p, std::size_t q) const {
    ComplexSeq c;
    c.reserve(taps_.size());
    for (const auto& t : taps_) c.push_back(t(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)));
    return c;
}

Eigen::MatrixXcd PolyphaseMatrix::evaluate(cplx z) const {
    const cplx zinv = 1.0 / z;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(taps_.front().rows(), taps_.front().cols());
    cplx power = 1.0;
    for (const auto& t : taps_) {
        acc += power * t;
        power *= zinv;
    }
    return acc;
}

PolyphaseMatrix synthesize_polyphase(const ParaunitaryFactors& factors) {
    const auto p = static_cast<Eigen::Index>(factors.order);
    if (p == 0 || factors.unitary.rows() != p || factors.unitary.cols() != p) {
        throw std::invalid_argument("synthesize_polyphase: V must be P x P");
    }
    // Running product of degree-one factors, kept as a tap list.
    std::vector<Eigen::MatrixXcd> taps{factors.scale * Eigen::MatrixXcd::Identity(p, p)};
    for (const auto& v : factors.vectors) {
        if (v.size() != p) throw std::invalid_argument("synthesize_polyphase: v_l must have length P");
        const Eigen::MatrixXcd proj = v * v.adjoint();
        const Eigen::MatrixXcd keep = Eigen::MatrixXcd::Identity(p, p) - proj;
        std::vector<Eigen::MatrixXcd> next(taps.size() + 1, Eigen::MatrixXcd::Zero(p, p));
        for (std::size_t d = 0; d < taps.size(); ++d) {
            next[d] += taps[d] * keep;
            next[d + 1] += taps[d] * proj;
        }
        taps = std::move(next);
    }
    for (auto& t : taps) t = t * factors.unitary;
    return PolyphaseMatrix(std::move(taps));
}

std::vector<ComplexSeq> polyphase_to_pulses(const PolyphaseMatrix& pm, std::size_t num_subcarriers,
                                            std::size_t first_nonzero) {
    const std::size_t order = pm.order();
    if (order == 0) throw std::invalid_argument("polyphase_to_pulses: empty polyphase matrix");
    if (num_subcarriers < 2 * first_nonzero) {
        throw std::invalid_argument("polyphase_to_pulses: first non-zero index exceeds N/2");
    }
    const std::size_t support_len = order * (pm.degree() + 1);
    const std::size_t last = first_nonzero + support_len - 1;
    const std::size_t bound = num_subcarriers - first_nonzero;
    if (last > bound) {
        std::ostringstream msg;
        msg << "polyphase_to_pulses: support ends at sample " << last << " but must stay <= N - eta_1st = " << bound
            << " (degree " << pm.degree() << " too high for N=" << num_subcarriers << ", eta_1st=" << first_nonzero
            << ")";
        throw std::invalid_argument(msg.str());
    }

    const double root_n = std::sqrt(static_cast<double>(num_subcarriers));
    std::vector<ComplexSeq> pulses;
    pulses.reserve(order);
    for (std::size_t p = 0; p < order; ++p) {
        ComplexSeq time(num_subcarriers, cplx{});
        for (std::size_t d = 0; d <= pm.degree(); ++d) {
            for (std::size_t q = 0; q < order; ++q) {
                time[first_nonzero + order * d + q] =
                    root_n * pm.taps()[d](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
            }
        }
        dsp::dft_unitary_inplace(time);
        pulses.push_back(std::move(time));
    }
    return pulses;
}

std::vector<ComplexSeq> paraunitary_pulses(std::size_t order, const PulseLayout& layout, std::size_t num_tx,
                                           std::uint64_t seed) {
    layout.validate();
    const auto factors =
        random_factors(order, layout.nonzero_length(), layout.num_subcarriers, num_tx, seed);
    return polyphase_to_pulses(synthesize_polyphase(factors), layout.num_subcarriers, layout.first_nonzero());
}

}  // namespace cpofdm::paraunitary
