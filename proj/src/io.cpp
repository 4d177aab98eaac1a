#include "vrsverb/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vrsverb::io {

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    add_row(header);
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::invalid_argument("CsvWriter: column count mismatch");
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
    std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return s;
}

namespace {

void put_u32(std::string& s, uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u16(std::string& s, uint16_t v) {
    for (int i = 0; i < 2; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
uint32_t get_u32(const std::string& s, size_t off) {
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<uint8_t>(s[off + i]);
    return v;
}
uint16_t get_u16(const std::string& s, size_t off) {
    return static_cast<uint16_t>(static_cast<uint8_t>(s[off]) |
                                 (static_cast<uint8_t>(s[off + 1]) << 8));
}

}  // namespace

void write_wav(const std::filesystem::path& path, const std::vector<Signal>& channels,
               double sample_rate) {
    if (channels.empty()) throw std::invalid_argument("write_wav: no channels");
    const size_t frames = channels[0].size();
    for (const auto& c : channels)
        if (c.size() != frames) throw std::invalid_argument("write_wav: channel length mismatch");

    const auto n_ch = static_cast<uint16_t>(channels.size());
    const uint32_t rate = static_cast<uint32_t>(sample_rate);
    const uint32_t block = 4u * n_ch;
    const uint32_t data_bytes = static_cast<uint32_t>(frames) * block;

    std::string s;
    s.reserve(60 + data_bytes);
    s += "RIFF";
    put_u32(s, 4 + 26 + 12 + 8 + data_bytes);
    s += "WAVE";
    s += "fmt ";
    put_u32(s, 18);
    put_u16(s, 3);  // IEEE float
    put_u16(s, n_ch);
    put_u32(s, rate);
    put_u32(s, rate * block);
    put_u16(s, static_cast<uint16_t>(block));
    put_u16(s, 32);
    put_u16(s, 0);  // cbSize
    s += "fact";
    put_u32(s, 4);
    put_u32(s, static_cast<uint32_t>(frames));
    s += "data";
    put_u32(s, data_bytes);
    for (size_t n = 0; n < frames; ++n)
        for (const auto& c : channels) {
            float v = c[n];
            char b[4];
            std::memcpy(b, &v, 4);
            s.append(b, 4);
        }
    write_file(path, s);
}

WavData read_wav(const std::filesystem::path& path) {
    const std::string s = read_file(path);
    if (s.size() < 12 || s.compare(0, 4, "RIFF") != 0 || s.compare(8, 4, "WAVE") != 0)
        throw std::runtime_error("read_wav: not a RIFF/WAVE file");
    size_t pos = 12;
    uint16_t n_ch = 0, fmt = 0;
    uint32_t rate = 0;
    WavData out;
    while (pos + 8 <= s.size()) {
        const std::string id = s.substr(pos, 4);
        const uint32_t len = get_u32(s, pos + 4);
        pos += 8;
        if (id == "fmt ") {
            fmt = get_u16(s, pos);
            n_ch = get_u16(s, pos + 2);
            rate = get_u32(s, pos + 4);
        } else if (id == "data") {
            if (fmt != 3 || n_ch == 0) throw std::runtime_error("read_wav: expected float32 data");
            const size_t frames = len / (4u * n_ch);
            out.channels.assign(n_ch, Signal(frames));
            for (size_t n = 0; n < frames; ++n)
                for (uint16_t c = 0; c < n_ch; ++c) {
                    float v;
                    std::memcpy(&v, s.data() + pos + (n * n_ch + c) * 4, 4);
                    out.channels[c][n] = v;
                }
        }
        pos += len + (len & 1);
    }
    if (out.channels.empty()) throw std::runtime_error("read_wav: no data chunk");
    out.sample_rate = rate;
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

}  // namespace vrsverb::io
