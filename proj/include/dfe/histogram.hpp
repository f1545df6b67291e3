#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dfe {

/// A finite discrete probability vector over k >= 1 bins.
class Histogram {
public:
    explicit Histogram(std::vector<double> probs) : probs_(std::move(probs)) {
        if (probs_.empty()) throw std::invalid_argument("Histogram: need at least one bin");
        double sum = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0)) throw std::invalid_argument("Histogram: entries must be >= 0");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("Histogram: entries must sum to 1");
    }

    const std::vector<double>& probs() const { return probs_; }
    std::size_t bins() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }

private:
    std::vector<double> probs_;
};

/// lambda P + (1 - lambda) Q, entrywise.
inline Histogram mix(double lambda, const Histogram& P, const Histogram& Q) {
    if (P.bins() != Q.bins()) throw std::invalid_argument("mix: bin counts differ");
    std::vector<double> r(P.bins());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = lambda * P[i] + (1.0 - lambda) * Q[i];
    return Histogram(std::move(r));
}

}  // namespace dfe
