#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace cpofdm {

// Seeded generator with platform-independent mappings to uniform and Gaussian
// variates (std:: distributions are implementation-defined, which would break
// byte-identical reruns across toolchains).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    double standard_normal();
    // Circularly-symmetric CN(0, variance).
    std::complex<double> complex_normal(double variance);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Mixes a base seed with stream tags (splitmix64) so sub-streams such as
// (receiver, pulse) noise draws are independent and order-free.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

}  // namespace cpofdm
