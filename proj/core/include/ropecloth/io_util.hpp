#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "ropecloth/errors.hpp"

namespace ropecloth {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian and assume a little-endian host");

class BinaryWriter {
  public:
    explicit BinaryWriter(const std::filesystem::path& path)
        : out_(path, std::ios::binary), path_(path.string()) {
        if (!out_) throw IoError("cannot open for writing: " + path_);
    }

    void bytes(const void* data, std::size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void f64(double v) { bytes(&v, 8); }
    void f64_array(std::span<const double> v) { bytes(v.data(), v.size() * 8); }
    void magic(const char (&tag)[9]) { bytes(tag, 8); }

    void close() {
        out_.close();
        if (!out_) throw IoError("write failed: " + path_);
    }

  private:
    std::ofstream out_;
    std::string path_;
};

class BinaryReader {
  public:
    explicit BinaryReader(const std::filesystem::path& path)
        : in_(path, std::ios::binary), path_(path.string()) {
        if (!in_) throw IoError("cannot open for reading: " + path_);
    }

    void bytes(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n))
            throw IoError("unexpected end of file: " + path_);
    }
    std::uint8_t u8() { std::uint8_t v; bytes(&v, 1); return v; }
    std::uint32_t u32() { std::uint32_t v; bytes(&v, 4); return v; }
    std::uint64_t u64() { std::uint64_t v; bytes(&v, 8); return v; }
    double f64() { double v; bytes(&v, 8); return v; }
    void f64_array(std::span<double> v) { bytes(v.data(), v.size() * 8); }
    void expect_magic(const char (&tag)[9]) {
        char got[8];
        bytes(got, 8);
        if (std::memcmp(got, tag, 8) != 0)
            throw IoError("bad file magic in " + path_);
    }

  private:
    std::ifstream in_;
    std::string path_;
};

/// Lossless double formatting (%.17g) shared by every text format.
std::string format_double(double v);

}  // namespace ropecloth
