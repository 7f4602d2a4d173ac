#include "cpofdm/cod.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "cpofdm/random.hpp"

namespace cpofdm::cod {

OrthogonalDesign::OrthogonalDesign(std::size_t rows, std::size_t cols, std::size_t num_vars,
                                   std::vector<Entry> entries)
    : rows_(rows), cols_(cols), num_vars_(num_vars), entries_(std::move(entries)) {
    if (rows_ == 0 || cols_ == 0 || num_vars_ == 0) throw std::invalid_argument("OrthogonalDesign: empty design");
    if (entries_.size() != rows_ * cols_) throw std::invalid_argument("OrthogonalDesign: entry count != rows*cols");
    for (std::size_t r = 0; r < rows_; ++r) {
        std::vector<int> uses(num_vars_, 0);
        for (std::size_t c = 0; c < cols_; ++c) {
            const Entry& e = at(r, c);
            if (e.kind == EntryKind::zero) continue;
            if (e.variable >= num_vars_) throw std::invalid_argument("OrthogonalDesign: variable index out of range");
            if (e.sign != 1 && e.sign != -1) throw std::invalid_argument("OrthogonalDesign: sign must be +-1");
            ++uses[e.variable];
        }
        for (std::size_t v = 0; v < num_vars_; ++v) {
            if (uses[v] != 1) {
                std::ostringstream msg;
                msg << "OrthogonalDesign: row " << r << " uses x" << v + 1 << ' ' << uses[v]
                    << " times (must be exactly once)";
                throw std::invalid_argument(msg.str());
            }
        }
    }
}

Eigen::MatrixXcd OrthogonalDesign::evaluate(std::span<const cplx> assignment) const {
    if (assignment.size() != num_vars_) throw std::invalid_argument("OrthogonalDesign: assignment size mismatch");
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            const Entry& e = at(r, c);
            switch (e.kind) {
                case EntryKind::zero: break;
                case EntryKind::variable: x(r, c) = static_cast<double>(e.sign) * assignment[e.variable]; break;
                case EntryKind::conjugate:
                    x(r, c) = static_cast<double>(e.sign) * std::conj(assignment[e.variable]);
                    break;
            }
        }
    }
    return x;
}

OrthogonalDesign OrthogonalDesign::without_row(std::size_t row) const {
    if (row >= rows_ || rows_ == 1) throw std::invalid_argument("OrthogonalDesign: cannot remove row");
    std::vector<Entry> kept;
    kept.reserve((rows_ - 1) * cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        if (r == row) continue;
        for (std::size_t c = 0; c < cols_; ++c) kept.push_back(at(r, c));
    }
    return {rows_ - 1, cols_, num_vars_, std::move(kept)};
}

std::string OrthogonalDesign::to_string() const {
    std::ostringstream out;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            const Entry& e = at(r, c);
            std::string cell = "0";
            if (e.kind != EntryKind::zero) {
                cell = (e.sign < 0 ? "-x" : "x") + std::to_string(e.variable + 1);
                if (e.kind == EntryKind::conjugate) cell += '*';
            }
            out << (c ? "\t" : "") << cell;
        }
        out << '\n';
    }
    return out.str();
}

OrthogonalDesign alamouti_design() {
    return {2, 2, 2,
            {Entry::var(0), Entry::var(1),
             Entry::conj(1, -1), Entry::conj(0)}};
}

OrthogonalDesign cod4_design() {
    const Entry z = Entry::none();
    return {4, 4, 3,
            {Entry::var(0),      Entry::var(1),      Entry::var(2),  z,
             Entry::conj(1, -1), Entry::conj(0),     z,              Entry::var(2),
             Entry::conj(2, -1), z,                  Entry::conj(0), Entry::var(1, -1),
             z,                  Entry::conj(2, -1), Entry::conj(1), Entry::var(0)}};
}

OrthogonalDesign design_for_transmitters(std::size_t num_tx) {
    switch (num_tx) {
        case 1: return {1, 1, 1, {Entry::var(0)}};
        case 2: return alamouti_design();
        case 3: return cod4_design().without_row(3);
        case 4: return cod4_design();
        default: {
            std::ostringstream msg;
            msg << "no orthogonal design shipped for " << num_tx << " transmitters (supported: 1-4)";
            throw std::invalid_argument(msg.str());
        }
    }
}

Rational cod_rate(std::size_t num_tx) {
    if (num_tx == 0) throw std::invalid_argument("cod_rate: transmitter count must be >= 1");
    if (num_tx == 1) return {1, 1};
    const auto half = static_cast<std::int64_t>((num_tx + 1) / 2);
    std::int64_t num = half + 1;
    std::int64_t den = 2 * half;
    const std::int64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

double verify_cod(const OrthogonalDesign& design, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("verify_cod: trials must be >= 1");
    Rng rng(seed);
    std::vector<cplx> assignment(design.num_vars());
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        double power = 0.0;
        for (auto& x : assignment) {
            x = rng.complex_normal(1.0);
            power += std::norm(x);
        }
        const Eigen::MatrixXcd x = design.evaluate(assignment);
        const Eigen::MatrixXcd gram = x * x.adjoint();
        const Eigen::MatrixXcd target = power * Eigen::MatrixXcd::Identity(design.rows(), design.rows());
        worst = std::max(worst, (gram - target).norm());
    }
    return worst;
}

WaveformSet place_pulses(const OrthogonalDesign& design, std::span<const ComplexSeq> base_pulses,
                         const PulseLayout& layout) {
    layout.validate();
    if (base_pulses.size() != design.num_vars()) {
        std::ostringstream msg;
        msg << "place_pulses: design needs " << design.num_vars() << " base pulses, got " << base_pulses.size();
        throw std::invalid_argument(msg.str());
    }
    const std::size_t n = layout.num_subcarriers;
    for (std::size_t i = 0; i < base_pulses.size(); ++i) {
        if (base_pulses[i].size() != n) {
            throw std::invalid_argument("place_pulses: base pulse " + std::to_string(i) + " has length != N");
        }
        const ComplexSeq time = dsp::idft_unitary(base_pulses[i]);
        if (auto why = zero_condition_violation(time, layout, kZeroConditionTolerance)) {
            throw std::invalid_argument("place_pulses: base pulse " + std::to_string(i) + " rejected: " + *why);
        }
    }

    std::vector<ComplexSeq> weights;
    weights.reserve(design.rows() * design.cols());
    for (std::size_t a = 0; a < design.rows(); ++a) {
        for (std::size_t p = 0; p < design.cols(); ++p) {
            const Entry& e = design.at(a, p);
            ComplexSeq s(n, cplx{});
            if (e.kind != EntryKind::zero) {
                const auto& base = base_pulses[e.variable];
                const double sign = static_cast<double>(e.sign);
                for (std::size_t k = 0; k < n; ++k) {
                    s[k] = sign * (e.kind == EntryKind::conjugate ? std::conj(base[k]) : base[k]);
                }
            }
            weights.push_back(std::move(s));
        }
    }
    return {layout, design.rows(), design.cols(), design.num_vars(), std::move(weights)};
}

double verify_flat_unitary(const WaveformSet& ws) {
    const std::size_t t = ws.num_tx();
    double worst = 0.0;
    for (std::size_t k = 0; k < ws.num_subcarriers(); ++k) {
        const Eigen::MatrixXcd s = ws.subcarrier_matrix(k);
        const Eigen::MatrixXcd gram = s * s.adjoint();
        const double c = gram.diagonal().real().mean();
        const Eigen::MatrixXcd dev = gram - c * Eigen::MatrixXcd::Identity(t, t);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(dev, Eigen::EigenvaluesOnly);
        worst = std::max(worst, eig.eigenvalues().cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace cpofdm::cod
