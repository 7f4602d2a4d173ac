#include "cpofdm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cpofdm/random.hpp"

namespace cpofdm::baselines {

void CodeSet::validate() const {
    if (codes.empty()) throw std::invalid_argument("code set '" + label + "' is empty");
    const std::size_t len = codes.front().size();
    if (len == 0) throw std::invalid_argument("code set '" + label + "' has zero-length codes");
    for (std::size_t a = 0; a < codes.size(); ++a) {
        if (codes[a].size() != len) {
            std::ostringstream msg;
            msg << "code set '" << label << "': transmitter " << a << " has length " << codes[a].size()
                << ", expected " << len;
            throw std::invalid_argument(msg.str());
        }
        for (std::size_t n = 0; n < len; ++n) {
            if (!(std::abs(std::abs(codes[a][n]) - 1.0) <= 1e-12)) {
                std::ostringstream msg;
                msg << "code set '" << label << "': chip " << n << " of transmitter " << a << " is not unit modulus";
                throw std::invalid_argument(msg.str());
            }
        }
    }
}

ComplexSeq p4_code(std::size_t length) {
    if (length == 0) throw std::invalid_argument("p4_code: length must be >= 1");
    const double nn = static_cast<double>(length);
    ComplexSeq c(length);
    for (std::size_t i = 0; i < length; ++i) {
        const double k = static_cast<double>(i);  // n - 1
        // k (k - N) can reach N^2/4; reduce modulo 2N before scaling by pi/N.
        const double arg = std::fmod(k * (k - nn), 2.0 * nn);
        c[i] = std::polar(1.0, std::numbers::pi * arg / nn);
    }
    return c;
}

CodeSet p4_code_set(std::size_t num_tx, std::size_t length, std::uint64_t seed) {
    if (num_tx == 0) throw std::invalid_argument("p4_code_set: need at least one transmitter");
    CodeSet set;
    set.label = "p4";
    set.codes.push_back(p4_code(length));
    if (num_tx > 1) {
        ComplexSeq c = set.codes.front();
        for (auto& v : c) v = std::conj(v);
        set.codes.push_back(std::move(c));
    }
    Rng rng(seed);
    while (set.codes.size() < num_tx) {
        ComplexSeq c(length);
        for (auto& v : c) v = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
        set.codes.push_back(std::move(c));
    }
    return set;
}

ComplexSeq lfm_pulse(std::size_t length, double kappa) {
    if (length < 2) throw std::invalid_argument("lfm_pulse: length must be >= 2");
    const double nn = static_cast<double>(length);
    const double amp = 1.0 / std::sqrt(nn);
    ComplexSeq s(length);
    for (std::size_t i = 0; i < length; ++i) {
        const double n = static_cast<double>(i);
        s[i] = std::polar(amp, std::numbers::pi * kappa * n * n / nn);
    }
    return s;
}

ComplexSeq autocorrelation(std::span<const cplx> x) {
    if (x.empty()) throw std::invalid_argument("autocorrelation: empty input");
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    ComplexSeq r(static_cast<std::size_t>(2 * n - 1));
    for (std::ptrdiff_t lag = -(n - 1); lag <= n - 1; ++lag) {
        cplx acc{};
        for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, -lag); i < std::min(n, n - lag); ++i) {
            acc += x[static_cast<std::size_t>(i + lag)] * std::conj(x[static_cast<std::size_t>(i)]);
        }
        r[static_cast<std::size_t>(lag + n - 1)] = acc;
    }
    return r;
}

double peak_sidelobe_ratio_db(std::span<const cplx> x) {
    if (x.size() < 2) throw std::invalid_argument("peak_sidelobe_ratio_db: need at least two samples");
    const ComplexSeq r = autocorrelation(x);
    const std::size_t centre = x.size() - 1;
    double side = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i != centre) side = std::max(side, std::abs(r[i]));
    }
    return 20.0 * std::log10(std::abs(r[centre]) / side);
}

std::vector<ComplexSeq> transmit_pulses(const CodeSet& set, std::size_t num_pulses) {
    set.validate();
    if (num_pulses == 0) throw std::invalid_argument("transmit_pulses: P must be >= 1");
    const double target = 1.0 / static_cast<double>(set.num_tx() * num_pulses);
    std::vector<ComplexSeq> out;
    for (const auto& c : set.codes) {
        const double g = std::sqrt(target / dsp::energy(c));
        ComplexSeq s = c;
        for (auto& v : s) v *= g;
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

void check_scene(std::span<const ComplexSeq> pulses, const RcsRealization& rcs, const SceneConfig& scene) {
    scene.validate();
    if (pulses.size() != scene.num_tx) throw std::invalid_argument("baseline: one pulse per transmitter required");
    if (pulses.empty() || pulses.front().empty()) throw std::invalid_argument("baseline: empty pulse");
    for (const auto& p : pulses) {
        if (p.size() != pulses.front().size()) throw std::invalid_argument("baseline: pulses differ in length");
    }
    if (rcs.d.dim0() != scene.num_rx || rcs.d.dim1() != scene.num_tx || rcs.d.dim2() != scene.range_cells) {
        throw std::invalid_argument("baseline: RCS tensor does not match the scene");
    }
}

std::size_t stream_length(std::size_t code_length, const SceneConfig& scene) {
    return code_length + scene.eta_max + scene.range_cells - 1;
}

// Adds d * s delayed by eta + m for the given pair to `u`.
void accumulate_pair(ComplexSeq& u, std::span<const cplx> s, const RcsRealization& rcs, std::size_t b,
                     std::size_t a, std::size_t eta) {
    for (std::size_t m = 0; m < rcs.d.dim2(); ++m) {
        const cplx dv = rcs.d(b, a, m);
        if (dv == cplx{}) continue;
        const std::size_t off = eta + m;
        for (std::size_t n = 0; n < s.size(); ++n) u[off + n] += dv * s[n];
    }
}

cplx correlate(std::span<const cplx> u, std::span<const cplx> ref, std::size_t offset) {
    cplx acc{};
    for (std::size_t n = 0; n < ref.size(); ++n) acc += std::conj(ref[n]) * u[offset + n];
    return acc;
}

}  // namespace

std::vector<ComplexSeq> synthesize_code_streams(std::span<const ComplexSeq> pulses, const RcsRealization& rcs,
                                                const SceneConfig& scene, std::size_t num_pulses,
                                                double sigma_n2, std::uint64_t noise_seed) {
    check_scene(pulses, rcs, scene);
    if (!(sigma_n2 >= 0.0)) throw std::invalid_argument("baseline: noise variance must be >= 0");
    const std::size_t len = stream_length(pulses.front().size(), scene);
    std::vector<ComplexSeq> streams(scene.num_rx * num_pulses, ComplexSeq(len));
    for (std::size_t b = 0; b < scene.num_rx; ++b) {
        for (std::size_t p = 0; p < num_pulses; ++p) {
            ComplexSeq& u = streams[b * num_pulses + p];
            for (std::size_t a = 0; a < scene.num_tx; ++a) accumulate_pair(u, pulses[a], rcs, b, a, scene.eta[b][a]);
            if (sigma_n2 > 0.0) {
                Rng rng(derive_seed(noise_seed, {b, p}));
                for (auto& v : u) v += rng.complex_normal(sigma_n2);
            }
        }
    }
    return streams;
}

Tensor3<cplx> matched_filter_range(std::span<const ComplexSeq> streams, std::span<const ComplexSeq> pulses,
                                   const SceneConfig& scene, std::size_t num_pulses) {
    scene.validate();
    if (pulses.size() != scene.num_tx) throw std::invalid_argument("matched_filter_range: one reference per transmitter");
    if (streams.size() != scene.num_rx * num_pulses) {
        throw std::invalid_argument("matched_filter_range: expected R * P streams");
    }
    Tensor3<cplx> est(scene.num_rx, scene.num_tx, scene.range_cells);
    for (std::size_t a = 0; a < scene.num_tx; ++a) {
        const std::size_t len = stream_length(pulses[a].size(), scene);
        const double norm = static_cast<double>(num_pulses) * dsp::energy(pulses[a]);
        if (!(norm > 0.0)) throw std::invalid_argument("matched_filter_range: zero-energy reference");
        for (std::size_t b = 0; b < scene.num_rx; ++b) {
            for (std::size_t p = 0; p < num_pulses; ++p) {
                if (streams[b * num_pulses + p].size() != len) {
                    throw std::invalid_argument("matched_filter_range: stream length mismatch");
                }
            }
            for (std::size_t m = 0; m < scene.range_cells; ++m) {
                cplx acc{};
                for (std::size_t p = 0; p < num_pulses; ++p) {
                    acc += correlate(streams[b * num_pulses + p], pulses[a], scene.eta[b][a] + m);
                }
                est(b, a, m) = acc / norm;
            }
        }
    }
    return est;
}

Tensor3<cplx> code_set_simulate(const CodeSet& set, const SceneConfig& scene, const RcsRealization& rcs,
                                std::size_t num_pulses, std::uint64_t noise_seed) {
    const auto pulses = transmit_pulses(set, num_pulses);
    const auto streams = synthesize_code_streams(pulses, rcs, scene, num_pulses, scene.sigma_n2, noise_seed);
    return matched_filter_range(streams, pulses, scene, num_pulses);
}

Tensor3<cplx> fd_lfm_simulate(const SceneConfig& scene, const RcsRealization& rcs, LfmConfig lfm,
                              std::size_t num_pulses, std::uint64_t noise_seed) {
    scene.validate();
    if (num_pulses == 0) throw std::invalid_argument("fd_lfm_simulate: P must be >= 1");
    ComplexSeq pulse = lfm_pulse(lfm.length, lfm.kappa);
    const double g = std::sqrt(1.0 / static_cast<double>(scene.num_tx * num_pulses));
    for (auto& v : pulse) v *= g;
    check_scene(std::vector<ComplexSeq>(scene.num_tx, pulse), rcs, scene);

    const std::size_t len = stream_length(pulse.size(), scene);
    const double norm = static_cast<double>(num_pulses) * dsp::energy(pulse);
    Tensor3<cplx> est(scene.num_rx, scene.num_tx, scene.range_cells);
    ComplexSeq u(len);
    for (std::size_t b = 0; b < scene.num_rx; ++b) {
        for (std::size_t a = 0; a < scene.num_tx; ++a) {
            std::vector<cplx> acc(scene.range_cells);
            for (std::size_t p = 0; p < num_pulses; ++p) {
                std::fill(u.begin(), u.end(), cplx{});
                accumulate_pair(u, pulse, rcs, b, a, scene.eta[b][a]);
                if (scene.sigma_n2 > 0.0) {
                    Rng rng(derive_seed(noise_seed, {b, p, a}));
                    for (auto& v : u) v += rng.complex_normal(scene.sigma_n2);
                }
                for (std::size_t m = 0; m < scene.range_cells; ++m) acc[m] += correlate(u, pulse, scene.eta[b][a] + m);
            }
            for (std::size_t m = 0; m < scene.range_cells; ++m) est(b, a, m) = acc[m] / norm;
        }
    }
    return est;
}

Tensor3<cplx> compensate_baseline(const Tensor3<cplx>& d_est, const Tensor3<double>& tau_sum, double carrier_hz) {
    if (d_est.size() != tau_sum.size()) throw std::invalid_argument("compensate_baseline: shape mismatch");
    Tensor3<cplx> g(d_est.dim0(), d_est.dim1(), d_est.dim2());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.data()[i] = d_est.data()[i] * std::conj(carrier_phase(carrier_hz, tau_sum.data()[i]));
    }
    return g;
}

CodeSet read_code_set(std::istream& in, const std::string& label) {
    CodeSet set;
    set.label = label;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        ComplexSeq code;
        std::stringstream row(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(row, cell, ',')) {
            ++col;
            std::size_t used = 0;
            double phase = 0.0;
            try {
                phase = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            const auto rest = cell.find_first_not_of(" \t\r", used);
            if (used == 0 || rest != std::string::npos || !std::isfinite(phase)) {
                std::ostringstream msg;
                msg << label << ":" << lineno << ": column " << col << ": '" << cell << "' is not a phase in radians";
                throw std::invalid_argument(msg.str());
            }
            code.push_back(std::polar(1.0, phase));
        }
        if (!set.codes.empty() && code.size() != set.codes.front().size()) {
            std::ostringstream msg;
            msg << label << ":" << lineno << ": row has " << code.size() << " phases, expected "
                << set.codes.front().size();
            throw std::invalid_argument(msg.str());
        }
        set.codes.push_back(std::move(code));
    }
    if (set.codes.empty()) throw std::invalid_argument(label + ": no code rows found");
    set.validate();
    return set;
}

CodeSet load_code_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open code set file " + path.string());
    return read_code_set(in, path.string());
}

void write_code_set(std::ostream& out, const CodeSet& set) {
    set.validate();
    out << "# " << set.label << ": " << set.num_tx() << " codes of length " << set.length() << ", phases in radians\n";
    out << std::setprecision(17);
    for (const auto& c : set.codes) {
        for (std::size_t n = 0; n < c.size(); ++n) out << (n ? "," : "") << std::arg(c[n]);
        out << '\n';
    }
}

void save_code_set(const std::filesystem::path& path, const CodeSet& set) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write code set file " + path.string());
    write_code_set(out, set);
}

}  // namespace cpofdm::baselines
