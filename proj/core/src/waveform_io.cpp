#include "cpofdm/waveform_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string_view>

namespace cpofdm::io {

static_assert(std::endian::native == std::endian::little, "binary containers assume a little-endian host");

namespace {

constexpr std::string_view kWaveformMagic = "CPOFDMWS";
constexpr std::string_view kFactorsMagic = "CPOFDMPF";
constexpr std::uint32_t kVersion = 1;
// Guards against allocating absurd buffers from a corrupt header.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

template <typename T>
void put(std::ostream& out, T value) {
    std::array<char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    out.write(bytes.data(), bytes.size());
}

template <typename T>
T get(std::istream& in) {
    std::array<char, sizeof(T)> bytes{};
    in.read(bytes.data(), bytes.size());
    if (!in) throw std::runtime_error("binary container truncated");
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

void put_complex(std::ostream& out, cplx v) {
    put(out, v.real());
    put(out, v.imag());
}

cplx get_complex(std::istream& in) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    return {re, im};
}

void put_header(std::ostream& out, std::string_view magic) {
    out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
    put(out, kVersion);
}

void expect_header(std::istream& in, std::string_view magic) {
    std::array<char, 8> tag{};
    in.read(tag.data(), tag.size());
    if (!in || std::string_view(tag.data(), tag.size()) != magic) {
        throw std::runtime_error("not a " + std::string(magic) + " container");
    }
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion) throw std::runtime_error("unsupported container version " + std::to_string(version));
}

std::size_t get_size(std::istream& in) {
    const auto v = get<std::uint64_t>(in);
    if (v > kMaxElements) throw std::runtime_error("container header field out of range");
    return static_cast<std::size_t>(v);
}

}  // namespace

void write_waveform_set(std::ostream& out, const WaveformSet& ws) {
    put_header(out, kWaveformMagic);
    const auto& layout = ws.layout();
    for (std::uint64_t v : {std::uint64_t{layout.num_subcarriers}, std::uint64_t{ws.num_tx()},
                            std::uint64_t{ws.num_pulses()}, std::uint64_t{ws.num_nonzero()},
                            std::uint64_t{layout.eta_max}, std::uint64_t{layout.range_cells}}) {
        put(out, v);
    }
    for (std::size_t a = 0; a < ws.num_tx(); ++a) {
        for (std::size_t p = 0; p < ws.num_pulses(); ++p) {
            for (const cplx& v : ws.freq(a, p)) put_complex(out, v);
        }
    }
    if (!out) throw std::runtime_error("failed writing waveform container");
}

WaveformSet read_waveform_set(std::istream& in) {
    expect_header(in, kWaveformMagic);
    PulseLayout layout;
    layout.num_subcarriers = get_size(in);
    const std::size_t num_tx = get_size(in);
    const std::size_t num_pulses = get_size(in);
    const std::size_t num_nonzero = get_size(in);
    layout.eta_max = get_size(in);
    layout.range_cells = get_size(in);
    if (num_tx * num_pulses * layout.num_subcarriers > kMaxElements) {
        throw std::runtime_error("waveform container dimensions out of range");
    }
    std::vector<ComplexSeq> weights(num_tx * num_pulses, ComplexSeq(layout.num_subcarriers));
    for (auto& seq : weights) {
        for (auto& v : seq) v = get_complex(in);
    }
    return {layout, num_tx, num_pulses, num_nonzero, std::move(weights)};
}

void save_waveform_set(const std::filesystem::path& path, const WaveformSet& ws) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_waveform_set(out, ws);
}

WaveformSet load_waveform_set(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open waveform container " + path.string());
    return read_waveform_set(in);
}

void write_waveform_csv(std::ostream& out, const WaveformSet& ws) {
    out << "k,alpha,p,re,im\n";
    out << std::setprecision(17);
    for (std::size_t k = 0; k < ws.num_subcarriers(); ++k) {
        for (std::size_t a = 0; a < ws.num_tx(); ++a) {
            for (std::size_t p = 0; p < ws.num_pulses(); ++p) {
                const cplx v = ws.freq(a, p)[k];
                out << k << ',' << a << ',' << p << ',' << v.real() << ',' << v.imag() << '\n';
            }
        }
    }
}

void write_factors(std::ostream& out, const paraunitary::ParaunitaryFactors& f) {
    put_header(out, kFactorsMagic);
    for (std::uint64_t v : {std::uint64_t{f.order}, std::uint64_t{f.nonzero_length},
                            std::uint64_t{f.num_subcarriers}, std::uint64_t{f.num_tx},
                            std::uint64_t{f.vectors.size()}}) {
        put(out, v);
    }
    put(out, f.scale);
    for (Eigen::Index r = 0; r < f.unitary.rows(); ++r) {
        for (Eigen::Index c = 0; c < f.unitary.cols(); ++c) put_complex(out, f.unitary(r, c));
    }
    for (const auto& v : f.vectors) {
        for (Eigen::Index i = 0; i < v.size(); ++i) put_complex(out, v(i));
    }
    if (!out) throw std::runtime_error("failed writing factors container");
}

paraunitary::ParaunitaryFactors read_factors(std::istream& in) {
    expect_header(in, kFactorsMagic);
    paraunitary::ParaunitaryFactors f;
    f.order = get_size(in);
    f.nonzero_length = get_size(in);
    f.num_subcarriers = get_size(in);
    f.num_tx = get_size(in);
    const std::size_t count = get_size(in);
    if (f.order == 0 || f.order * f.order > kMaxElements || count * f.order > kMaxElements) {
        throw std::runtime_error("factors container dimensions out of range");
    }
    f.scale = get<double>(in);
    const auto p = static_cast<Eigen::Index>(f.order);
    f.unitary.resize(p, p);
    for (Eigen::Index r = 0; r < p; ++r) {
        for (Eigen::Index c = 0; c < p; ++c) f.unitary(r, c) = get_complex(in);
    }
    f.vectors.assign(count, Eigen::VectorXcd(p));
    for (auto& v : f.vectors) {
        for (Eigen::Index i = 0; i < p; ++i) v(i) = get_complex(in);
    }
    return f;
}

}  // namespace cpofdm::io
