#include "cpofdm/scene.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cpofdm/random.hpp"

namespace cpofdm {

namespace {

double distance(const Point3& a, const Point3& b) {
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

}  // namespace

GeometryDelays delays_from_geometry(const Geometry& geometry) {
    if (geometry.transmitters.empty() || geometry.receivers.empty()) {
        throw std::invalid_argument("delays_from_geometry: need at least one transmitter and one receiver");
    }
    if (!(geometry.bandwidth_hz > 0.0)) throw std::invalid_argument("delays_from_geometry: bandwidth must be > 0");
    auto finite = [](const Point3& p) { return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z); };
    if (!finite(geometry.nearest_cell)) throw std::invalid_argument("delays_from_geometry: non-finite coordinate");
    for (const auto& p : geometry.transmitters) {
        if (!finite(p)) throw std::invalid_argument("delays_from_geometry: non-finite coordinate");
    }
    for (const auto& p : geometry.receivers) {
        if (!finite(p)) throw std::invalid_argument("delays_from_geometry: non-finite coordinate");
    }

    const std::size_t nr = geometry.receivers.size();
    const std::size_t nt = geometry.transmitters.size();
    GeometryDelays out;
    out.tau0_s.assign(nr, std::vector<double>(nt));
    double tau_min = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < nr; ++b) {
        const double rb = distance(geometry.receivers[b], geometry.nearest_cell);
        for (std::size_t a = 0; a < nt; ++a) {
            const double ra = distance(geometry.transmitters[a], geometry.nearest_cell);
            out.tau0_s[b][a] = (ra + rb) / kSpeedOfLight;
            tau_min = std::min(tau_min, out.tau0_s[b][a]);
        }
    }
    out.tau_min_s = tau_min;
    const double ts = 1.0 / geometry.bandwidth_hz;
    out.eta.assign(nr, std::vector<std::size_t>(nt));
    out.residual.assign(nr, std::vector<double>(nt));
    for (std::size_t b = 0; b < nr; ++b) {
        for (std::size_t a = 0; a < nt; ++a) {
            const double exact = (out.tau0_s[b][a] - tau_min) / ts;
            if (exact < 0.0) throw std::logic_error("delays_from_geometry: negative relative delay");
            const double rounded = std::round(exact);
            out.eta[b][a] = static_cast<std::size_t>(rounded);
            out.residual[b][a] = exact - rounded;
            out.eta_max = std::max(out.eta_max, out.eta[b][a]);
        }
    }
    return out;
}

double SceneConfig::base_delay(std::size_t beta, std::size_t alpha) const {
    if (!tau0_s.empty()) return tau0_s.at(beta).at(alpha);
    return tau_min() + static_cast<double>(eta.at(beta).at(alpha)) * sample_period();
}

Tensor3<double> SceneConfig::tau_sum() const {
    Tensor3<double> tau(num_rx, num_tx, range_cells);
    const double ts = sample_period();
    for (std::size_t b = 0; b < num_rx; ++b) {
        for (std::size_t a = 0; a < num_tx; ++a) {
            const double base = base_delay(b, a);
            for (std::size_t m = 0; m < range_cells; ++m) tau(b, a, m) = base + static_cast<double>(m) * ts;
        }
    }
    return tau;
}

void SceneConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("scene: " + what); };
    if (num_tx == 0 || num_rx == 0) fail("num_tx and num_rx must be >= 1");
    if (range_cells == 0) fail("range_cells must be >= 1");
    if (eta.size() != num_rx) fail("eta must have num_rx rows");
    for (std::size_t b = 0; b < num_rx; ++b) {
        if (eta[b].size() != num_tx) fail("eta must have num_tx columns");
        for (std::size_t a = 0; a < num_tx; ++a) {
            if (eta[b][a] > eta_max) {
                std::ostringstream msg;
                msg << "eta[" << b << "][" << a << "]=" << eta[b][a] << " exceeds eta_max=" << eta_max;
                fail(msg.str());
            }
        }
    }
    if (!tau0_s.empty()) {
        if (tau0_s.size() != num_rx) fail("tau0 must have num_rx rows");
        for (const auto& row : tau0_s) {
            if (row.size() != num_tx) fail("tau0 must have num_tx columns");
        }
    }
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) fail("bandwidth_hz must be > 0");
    if (!(carrier_hz >= 0.0) || !std::isfinite(carrier_hz)) fail("carrier_hz must be >= 0");
    if (!(sigma_d2 >= 0.0) || !std::isfinite(sigma_d2)) fail("sigma_d2 must be >= 0");
    if (!(sigma_n2 >= 0.0) || !std::isfinite(sigma_n2)) fail("sigma_n2 must be >= 0");
    if (!(range_cell0_m >= 0.0) || !std::isfinite(range_cell0_m)) fail("range_cell0_m must be >= 0");
    for (std::size_t m : target_cells) {
        if (m >= range_cells) fail("target cell " + std::to_string(m) + " outside [0, M-1]");
    }
}

std::vector<std::size_t> random_target_cells(std::size_t range_cells, std::size_t count, std::uint64_t seed) {
    if (count > range_cells) throw std::invalid_argument("random_target_cells: more targets than range cells");
    std::vector<std::size_t> cells(range_cells);
    std::iota(cells.begin(), cells.end(), std::size_t{0});
    Rng rng(seed);
    // Partial Fisher-Yates with the portable uniform.
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(range_cells - i));
        std::swap(cells[i], cells[std::min(j, range_cells - 1)]);
    }
    cells.resize(count);
    std::sort(cells.begin(), cells.end());
    return cells;
}

DelayMatrix random_delays(std::size_t num_rx, std::size_t num_tx, std::size_t eta_max, std::uint64_t seed) {
    Rng rng(seed);
    DelayMatrix eta(num_rx, std::vector<std::size_t>(num_tx));
    for (auto& row : eta) {
        for (auto& v : row) {
            v = std::min(eta_max, static_cast<std::size_t>(rng.uniform() * static_cast<double>(eta_max + 1)));
        }
    }
    return eta;
}

cplx carrier_phase(double carrier_hz, double tau_s) {
    // Reduce the cycle count first so the argument stays small.
    const double cycles = carrier_hz * tau_s;
    const double frac = cycles - std::floor(cycles);
    return std::polar(1.0, -2.0 * std::numbers::pi * frac);
}

RcsRealization make_rcs(const SceneConfig& scene, Tensor3<cplx> g) {
    if (g.dim0() != scene.num_rx || g.dim1() != scene.num_tx || g.dim2() != scene.range_cells) {
        throw std::invalid_argument("make_rcs: RCS tensor does not match the scene");
    }
    RcsRealization r;
    r.tau_sum = scene.tau_sum();
    r.d = Tensor3<cplx>(scene.num_rx, scene.num_tx, scene.range_cells);
    for (std::size_t b = 0; b < scene.num_rx; ++b) {
        for (std::size_t a = 0; a < scene.num_tx; ++a) {
            for (std::size_t m = 0; m < scene.range_cells; ++m) {
                const cplx gv = g(b, a, m);
                r.d(b, a, m) = gv == cplx{} ? cplx{} : gv * carrier_phase(scene.carrier_hz, r.tau_sum(b, a, m));
            }
        }
    }
    r.g = std::move(g);
    return r;
}

RcsRealization sample_rcs(const SceneConfig& scene, std::uint64_t seed) {
    scene.validate();
    Tensor3<cplx> g(scene.num_rx, scene.num_tx, scene.range_cells);
    if (scene.sigma_d2 > 0.0) {
        Rng rng(seed);
        for (std::size_t b = 0; b < scene.num_rx; ++b) {
            for (std::size_t a = 0; a < scene.num_tx; ++a) {
                for (std::size_t m : scene.target_cells) g(b, a, m) = rng.complex_normal(scene.sigma_d2);
            }
        }
    }
    return make_rcs(scene, std::move(g));
}

ReceivedFrame synthesize_noiseless(const WaveformSet& ws, const RcsRealization& rcs, const SceneConfig& scene) {
    scene.validate();
    const PulseLayout& layout = ws.layout();
    if (ws.num_tx() != scene.num_tx) throw std::invalid_argument("synthesize: waveform T differs from scene T");
    if (layout.range_cells != scene.range_cells || layout.eta_max != scene.eta_max) {
        throw std::invalid_argument("synthesize: waveform layout (M, eta_max) differs from the scene");
    }
    if (rcs.d.dim0() != scene.num_rx || rcs.d.dim1() != scene.num_tx || rcs.d.dim2() != scene.range_cells) {
        throw std::invalid_argument("synthesize: RCS tensor does not match the scene");
    }

    const std::size_t len = layout.frame_length();
    ReceivedFrame frame;
    frame.num_rx = scene.num_rx;
    frame.num_pulses = ws.num_pulses();
    frame.streams.assign(scene.num_rx * ws.num_pulses(), ComplexSeq(len));
    for (std::size_t b = 0; b < scene.num_rx; ++b) {
        for (std::size_t p = 0; p < ws.num_pulses(); ++p) {
            ComplexSeq& u = frame.stream(b, p);
            for (std::size_t a = 0; a < scene.num_tx; ++a) {
                if (ws.is_zero_pulse(a, p)) continue;
                const auto shift0 = static_cast<std::ptrdiff_t>(scene.eta[b][a]);
                for (std::size_t m = 0; m < scene.range_cells; ++m) {
                    const cplx dv = rcs.d(b, a, m);
                    if (dv == cplx{}) continue;
                    const std::ptrdiff_t shift = shift0 + static_cast<std::ptrdiff_t>(m);
                    for (std::size_t i = 0; i < len; ++i) {
                        u[i] += dv * ws.transmitted_sample(a, p, static_cast<std::ptrdiff_t>(i) - shift);
                    }
                }
            }
        }
    }
    return frame;
}

void add_noise(ReceivedFrame& frame, double sigma_n2, std::uint64_t noise_seed) {
    if (!(sigma_n2 >= 0.0)) throw std::invalid_argument("add_noise: variance must be >= 0");
    frame.noise_seed = noise_seed;
    frame.noisy = sigma_n2 > 0.0;
    if (!frame.noisy) return;
    for (std::size_t b = 0; b < frame.num_rx; ++b) {
        for (std::size_t p = 0; p < frame.num_pulses; ++p) {
            Rng rng(derive_seed(noise_seed, {b, p}));
            for (auto& v : frame.stream(b, p)) v += rng.complex_normal(sigma_n2);
        }
    }
}

ReceivedFrame synthesize_received(const WaveformSet& ws, const RcsRealization& rcs, const SceneConfig& scene,
                                  std::uint64_t noise_seed) {
    ReceivedFrame frame = synthesize_noiseless(ws, rcs, scene);
    add_noise(frame, scene.sigma_n2, noise_seed);
    return frame;
}

void write_frame_csv(std::ostream& out, const ReceivedFrame& frame) {
    out << "beta,p,i,re,im\n" << std::setprecision(17);
    for (std::size_t b = 0; b < frame.num_rx; ++b) {
        for (std::size_t p = 0; p < frame.num_pulses; ++p) {
            const auto& s = frame.stream(b, p);
            for (std::size_t i = 0; i < s.size(); ++i) {
                out << b << ',' << p << ',' << i << ',' << s[i].real() << ',' << s[i].imag() << '\n';
            }
        }
    }
}

}  // namespace cpofdm
