// File output helpers: reproducible CSV formatting, 32-bit float WAV, and
// content hashing for experiment manifests.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vrsverb/signal.hpp"

namespace vrsverb::io {

// 9 significant digits, '.' decimal separator, no locale dependence.
std::string format_g9(double v);

// Rows are joined with ',' and terminated with LF.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(const std::vector<std::string>& cells);
    const std::string& text() const { return text_; }

private:
    size_t columns_;
    std::string text_;
};

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// RIFF/WAVE, IEEE float32, interleaved.
void write_wav(const std::filesystem::path& path, const std::vector<Signal>& channels,
               double sample_rate);
struct WavData {
    std::vector<Signal> channels;
    double sample_rate = 0.0;
};
WavData read_wav(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);

}  // namespace vrsverb::io
