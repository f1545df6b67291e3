#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace dfe {

/// An n x d row-major matrix of sample embeddings.
struct EmbeddingSet {
    std::vector<double> data;
    std::size_t rows = 0;
    std::size_t dim = 0;

    EmbeddingSet() = default;
    EmbeddingSet(std::vector<double> d, std::size_t n, std::size_t k)
        : data(std::move(d)), rows(n), dim(k) {
        validate();
    }

    void validate() const {
        if (rows < 1 || dim < 1)
            throw std::invalid_argument("EmbeddingSet: need rows >= 1 and dim >= 1");
        if (data.size() != rows * dim)
            throw std::invalid_argument("EmbeddingSet: payload size mismatch");
        for (double v : data)
            if (!std::isfinite(v))
                throw std::invalid_argument("EmbeddingSet: non-finite entry");
    }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data.data() + i * dim, dim);
    }
    double at(std::size_t i, std::size_t j) const { return data[i * dim + j]; }
};

/// Row-concatenation of two sets with equal dimension.
inline EmbeddingSet vconcat(const EmbeddingSet& a, const EmbeddingSet& b) {
    if (a.dim != b.dim) throw std::invalid_argument("vconcat: dimension mismatch");
    std::vector<double> d;
    d.reserve(a.data.size() + b.data.size());
    d.insert(d.end(), a.data.begin(), a.data.end());
    d.insert(d.end(), b.data.begin(), b.data.end());
    return EmbeddingSet(std::move(d), a.rows + b.rows, a.dim);
}

inline double squared_distance(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - v[i];
        s += d * d;
    }
    return s;
}

}  // namespace dfe
