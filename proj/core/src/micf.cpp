#include "cpofdm/micf.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cpofdm/random.hpp"

namespace cpofdm::micf {

void MicfConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("micf config: " + what); };
    if (num_subcarriers < eta_max + range_cells) fail("N must be >= eta_max + M");
    if (range_cells == 0) fail("M must be >= 1");
    if (num_subcarriers + 3 <= 2 * eta_max + 2 * range_cells) fail("non-zero length N_t must be >= 1");
    const std::size_t nt = layout().nonzero_length();
    if (num_pulses == 0 || num_pulses > nt) {
        std::ostringstream msg;
        msg << "P=" << num_pulses << " must lie in [1, N_t=" << nt << "]";
        fail(msg.str());
    }
    if (num_tx == 0) fail("T must be >= 1");
    if (iterations == 0) fail("Q must be >= 1");
    if (oversampling == 0) fail("L must be >= 1");
    if (!(g_f > 0.0 && g_f < 1.0)) fail("G_f must lie in (0, 1)");
    if (!std::isfinite(papr_d_db)) fail("PAPR_d must be finite");
}

double xi_db(std::span<const ComplexSeq> pulses) {
    if (pulses.empty()) throw std::invalid_argument("xi_db: no pulses");
    const std::size_t n = pulses.front().size();
    if (n == 0) throw std::invalid_argument("xi_db: empty pulse");
    std::vector<double> power(n, 0.0);
    for (const auto& s : pulses) {
        if (s.size() != n) throw std::invalid_argument("xi_db: pulses differ in length");
        for (std::size_t k = 0; k < n; ++k) power[k] += std::norm(s[k]);
    }
    double total = 0.0;
    double inv_sum = 0.0;
    for (double pk : power) {
        if (pk <= 0.0) return -std::numeric_limits<double>::infinity();
        total += pk;
        inv_sum += 1.0 / pk;
    }
    const double nn = static_cast<double>(n);
    // HM <= AM, so the ratio can only exceed 1 by rounding.
    const double ratio = std::min(1.0, nn * nn / (total * inv_sum));
    return 10.0 * std::log10(ratio);
}

ComplexSeq time_clip(std::span<const cplx> x, double papr_d_db, dsp::IndexRange window) {
    if (window.last < window.first || window.last >= x.size()) {
        throw std::invalid_argument("time_clip: window outside the sequence");
    }
    ComplexSeq y(x.begin(), x.end());
    double mean = 0.0;
    for (std::size_t i = window.first; i <= window.last; ++i) mean += std::norm(x[i]);
    mean /= static_cast<double>(window.size());
    const double amp = std::sqrt(mean * std::pow(10.0, papr_d_db / 10.0));
    for (std::size_t i = window.first; i <= window.last; ++i) {
        const double mag = std::abs(x[i]);
        if (mag > amp) y[i] = x[i] * (amp / mag);
    }
    return y;
}

namespace {

// Returns Pav(q), the mean total power before clipping.
double frequency_clip(std::vector<ComplexSeq>& spectra, double g_f) {
    const std::size_t n = spectra.front().size();
    std::vector<double> power(n, 0.0);
    for (const auto& s : spectra) {
        for (std::size_t k = 0; k < n; ++k) power[k] += std::norm(s[k]);
    }
    double avg = 0.0;
    for (double pk : power) avg += pk;
    avg /= static_cast<double>(n);
    const double upper = avg * (1.0 + g_f);
    const double lower = avg * (1.0 - g_f);
    for (std::size_t k = 0; k < n; ++k) {
        double gain = 1.0;
        if (power[k] > upper) {
            gain = std::sqrt(upper / power[k]);
        } else if (power[k] < lower) {
            // An exactly empty subcarrier has no phase to scale; leave it.
            if (power[k] > 0.0) gain = std::sqrt(lower / power[k]);
        }
        if (gain != 1.0) {
            for (auto& s : spectra) s[k] *= gain;
        }
    }
    return avg;
}

}  // namespace

DesignResult micf_design(const MicfConfig& cfg, const IterationObserver& observer) {
    cfg.validate();
    const PulseLayout layout = cfg.layout();
    const std::size_t n = cfg.num_subcarriers;
    const std::size_t l = cfg.oversampling;
    const std::size_t ln = l * n;
    const std::size_t np = cfg.num_pulses;
    const dsp::IndexRange support = layout.support();
    // h(n) passband on the oversampled grid.
    const dsp::IndexRange os_window{l * support.first, l * (support.last + 1) - 1};

    Rng rng(cfg.seed);
    const double amp0 = 1.0 / std::sqrt(static_cast<double>(n * cfg.num_tx * np));
    std::vector<ComplexSeq> spectra(np, ComplexSeq(n));
    for (auto& s : spectra) {
        for (auto& v : s) v = std::polar(amp0, 2.0 * std::numbers::pi * rng.uniform());
    }

    ComplexSeq buf(ln);
    for (std::size_t q = 1; q <= cfg.iterations; ++q) {
        for (auto& s : spectra) {
            std::copy(s.begin(), s.end(), buf.begin());
            std::fill(buf.begin() + static_cast<std::ptrdiff_t>(n), buf.end(), cplx{});
            dsp::idft_unitary_inplace(buf);
            std::fill(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(os_window.first), cplx{});
            std::fill(buf.begin() + static_cast<std::ptrdiff_t>(os_window.last + 1), buf.end(), cplx{});
            buf = time_clip(buf, cfg.papr_d_db, os_window);
            dsp::dft_unitary_inplace(buf);
            std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n), s.begin());
        }
        const double avg = frequency_clip(spectra, cfg.g_f);
        if (observer) observer(q, spectra, avg);
    }

    const double target = 1.0 / static_cast<double>(cfg.num_tx * np);
    DesignResult result;
    result.iterations_run = cfg.iterations;
    result.pulses.reserve(np);
    for (auto& s : spectra) {
        ComplexSeq t = dsp::idft_unitary(s);
        for (std::size_t i = 0; i < n; ++i) {
            if (!support.contains(i)) t[i] = cplx{};
        }
        const double e = dsp::energy(t);
        if (!(e > 0.0)) throw std::runtime_error("micf_design: pulse vanished inside the support");
        const double g = std::sqrt(target / e);
        for (auto& v : t) v *= g;
        result.pulses.push_back(dsp::dft_unitary(t));
    }
    double sum = 0.0;
    for (const auto& s : result.pulses) {
        result.papr_db.push_back(dsp::papr_db(s, l, support));
        sum += result.papr_db.back();
    }
    result.mean_papr_db = sum / static_cast<double>(np);
    result.xi_db = xi_db(result.pulses);
    return result;
}

MonteCarloResult monte_carlo_cdf(const MicfConfig& cfg, std::size_t trials, Thresholds thresholds,
                                 std::size_t threads) {
    if (trials == 0) throw std::invalid_argument("monte_carlo_cdf: trials must be >= 1");
    cfg.validate();
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, trials);

    MonteCarloResult out;
    out.mean_papr_db.assign(trials, 0.0);
    out.xi_db.assign(trials, 0.0);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        try {
            for (std::size_t t = next++; t < trials && !failed; t = next++) {
                MicfConfig c = cfg;
                c.seed = cfg.seed + t;
                const DesignResult r = micf_design(c);
                out.mean_papr_db[t] = r.mean_papr_db;
                out.xi_db[t] = r.xi_db;
            }
        } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t t = 0; t < trials; ++t) {
        if (out.xi_db[t] >= thresholds.xi_min_db && out.mean_papr_db[t] <= thresholds.papr_max_db) {
            out.qualifying_trials.push_back(t);
        }
    }
    out.qualifying = out.qualifying_trials.size();
    out.papr_cdf = out.mean_papr_db;
    out.xi_cdf = out.xi_db;
    std::sort(out.papr_cdf.begin(), out.papr_cdf.end());
    std::sort(out.xi_cdf.begin(), out.xi_cdf.end());
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t h = values.size() / 2;
    return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

void write_cdf_csv(std::ostream& out, const MonteCarloResult& result) {
    out << "metric,value,probability\n";
    out << std::setprecision(17);
    auto emit = [&](const char* name, const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            out << name << ',' << v[i] << ',' << static_cast<double>(i + 1) / static_cast<double>(v.size()) << '\n';
        }
    };
    emit("mean_papr_db", result.papr_cdf);
    emit("xi_db", result.xi_cdf);
}

}  // namespace cpofdm::micf
