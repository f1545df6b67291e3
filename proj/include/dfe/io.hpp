#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfe/embedding.hpp"

namespace dfe {

/// Binary container: "DFE1", version u32, dtype u32 (0 = f32, 1 = f64),
/// rows u64, dim u64, then a row-major little-endian payload.
inline constexpr char kMagic[4] = {'D', 'F', 'E', '1'};
inline constexpr std::uint32_t kFormatVersion = 1;

namespace detail {

template <typename T>
void write_le(std::ostream& out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.write(buf, sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    char buf[sizeof(T)];
    in.read(buf, sizeof(T));
    if (!in) throw std::runtime_error("unexpected end of file");
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

}  // namespace detail

inline void write_binary(const std::string& path, const EmbeddingSet& X,
                         bool single_precision = false) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(kMagic, 4);
    detail::write_le<std::uint32_t>(out, kFormatVersion);
    detail::write_le<std::uint32_t>(out, single_precision ? 0u : 1u);
    detail::write_le<std::uint64_t>(out, X.rows);
    detail::write_le<std::uint64_t>(out, X.dim);
    if (single_precision) {
        for (double v : X.data) detail::write_le<float>(out, static_cast<float>(v));
    } else {
        for (double v : X.data) detail::write_le<double>(out, v);
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline EmbeddingSet read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("bad magic in '" + path + "'");
    const auto version = detail::read_le<std::uint32_t>(in);
    if (version != kFormatVersion)
        throw std::runtime_error("unsupported format version in '" + path + "'");
    const auto dtype = detail::read_le<std::uint32_t>(in);
    if (dtype > 1) throw std::runtime_error("unknown dtype code in '" + path + "'");
    const auto rows = detail::read_le<std::uint64_t>(in);
    const auto dim = detail::read_le<std::uint64_t>(in);
    if (rows < 1 || dim < 1) throw std::runtime_error("empty matrix in '" + path + "'");
    std::vector<double> data(rows * dim);
    if (dtype == 0) {
        for (double& v : data) v = detail::read_le<float>(in);
    } else {
        for (double& v : data) v = detail::read_le<double>(in);
    }
    char extra;
    if (in.read(&extra, 1))
        throw std::runtime_error("trailing bytes in '" + path + "'");
    return EmbeddingSet(std::move(data), rows, dim);
}

/// Headerless CSV of reals, one row per sample.
inline EmbeddingSet read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<double> data;
    std::size_t rows = 0, dim = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t cols = 0;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw std::runtime_error("non-numeric cell in '" + path + "'");
            }
            while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos])))
                ++pos;
            if (pos != cell.size())
                throw std::runtime_error("non-numeric cell in '" + path + "'");
            data.push_back(v);
            ++cols;
        }
        if (rows == 0)
            dim = cols;
        else if (cols != dim)
            throw std::runtime_error("ragged rows in '" + path + "'");
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("empty file '" + path + "'");
    return EmbeddingSet(std::move(data), rows, dim);
}

inline void write_csv(const std::string& path, const EmbeddingSet& X) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.precision(17);
    for (std::size_t i = 0; i < X.rows; ++i) {
        for (std::size_t j = 0; j < X.dim; ++j) {
            if (j) out << ',';
            out << X.at(i, j);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

/// Reads either format, sniffing on the magic bytes.
inline EmbeddingSet read_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    in.close();
    if (std::memcmp(magic, kMagic, 4) == 0) return read_binary(path);
    if (std::memcmp(magic, kMagic, 3) == 0)
        throw std::runtime_error("bad magic in '" + path + "'");
    return read_csv(path);
}

}  // namespace dfe
