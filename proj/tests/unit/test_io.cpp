#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cpofdm/cod.hpp"
#include "cpofdm/waveform_io.hpp"
#include "test_support.hpp"

using namespace cpofdm;

namespace {

WaveformSet sample_set() {
    const PulseLayout layout{64, 8, 4};
    std::vector<ComplexSeq> base{test::random_valid_pulse(layout, 1), test::random_valid_pulse(layout, 2)};
    return cod::place_pulses(cod::alamouti_design(), base, layout);
}

}  // namespace

TEST(WaveformIo, BitExactRoundTrip) {
    const WaveformSet ws = sample_set();
    std::stringstream buf;
    io::write_waveform_set(buf, ws);
    const std::string bytes = buf.str();
    // header 8 + 4 + 6*8, payload T*P*N*16
    EXPECT_EQ(bytes.size(), 60u + 2 * 2 * 64 * 16);
    EXPECT_EQ(bytes.substr(0, 8), "CPOFDMWS");
    const WaveformSet back = io::read_waveform_set(buf);
    EXPECT_TRUE(back == ws);
    EXPECT_EQ(back.layout(), ws.layout());
    EXPECT_EQ(back.num_nonzero(), 2u);
    std::stringstream again;
    io::write_waveform_set(again, back);
    EXPECT_EQ(again.str(), bytes);
}

TEST(WaveformIo, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "cpofdm_io_test.bin";
    const WaveformSet ws = sample_set();
    io::save_waveform_set(path, ws);
    EXPECT_TRUE(io::load_waveform_set(path) == ws);
    std::filesystem::remove(path);
    EXPECT_THROW(io::load_waveform_set(path), std::runtime_error);
}

TEST(WaveformIo, CorruptMagicAndVersion) {
    std::stringstream buf;
    io::write_waveform_set(buf, sample_set());
    std::string bytes = buf.str();
    std::string bad = bytes;
    bad[0] = 'X';
    std::istringstream in1(bad);
    EXPECT_THROW(io::read_waveform_set(in1), std::runtime_error);
    bad = bytes;
    bad[8] = 7;
    std::istringstream in2(bad);
    EXPECT_THROW(io::read_waveform_set(in2), std::runtime_error);
    // a factors reader must refuse a waveform container
    std::istringstream in3(bytes);
    EXPECT_THROW(io::read_factors(in3), std::runtime_error);
}

TEST(WaveformIo, TruncationDetected) {
    std::stringstream buf;
    io::write_waveform_set(buf, sample_set());
    const std::string bytes = buf.str();
    for (std::size_t cut : {std::size_t{4}, std::size_t{30}, bytes.size() - 1}) {
        std::istringstream in(bytes.substr(0, cut));
        EXPECT_THROW(io::read_waveform_set(in), std::runtime_error) << cut;
    }
}

TEST(WaveformIo, AbsurdHeaderRejected) {
    std::stringstream buf;
    io::write_waveform_set(buf, sample_set());
    std::string bytes = buf.str();
    // N field all ones
    for (int i = 0; i < 8; ++i) bytes[12 + i] = static_cast<char>(0xff);
    std::istringstream in(bytes);
    EXPECT_THROW(io::read_waveform_set(in), std::runtime_error);
}

TEST(WaveformCsv, HeaderAndRowCount) {
    const WaveformSet ws = sample_set();
    std::ostringstream out;
    io::write_waveform_csv(out, ws);
    const std::string s = out.str();
    EXPECT_EQ(s.rfind("k,alpha,p,re,im\n", 0), 0u);
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + 64 * 4);
}
