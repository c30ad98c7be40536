#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fuelclust/error.hpp"

namespace fuelclust {

/**
 * Dense N x d sample matrix in row-major order.
 *
 * The fuel-efficiency pipeline only ever clusters one scalar per trip, but the
 * mixture and validity code is written against this type so that d > 1 works too.
 */
class Samples {
public:
    Samples() = default;

    Samples(std::size_t rows, std::size_t dim, std::vector<double> values)
        : rows_(rows), dim_(dim), values_(std::move(values)) {
        if (dim_ == 0) {
            throw InvalidArgument("sample dimension must be positive");
        }
        if (values_.size() != rows_ * dim_) {
            throw InvalidArgument("sample buffer size does not match rows x dim");
        }
    }

    /// One-dimensional samples, one per value.
    static Samples from_scalars(std::vector<double> values) {
        const auto n = values.size();
        return Samples(n, 1, std::move(values));
    }

    std::size_t size() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return rows_ == 0; }

    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * dim_, dim_};
    }

    /// Value of a 1-D sample. Only meaningful when dim() == 1.
    double scalar(std::size_t i) const noexcept { return values_[i * dim_]; }

    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 1;
    std::vector<double> values_;
};

/// Hard cluster membership: labels[n] in [0, k).
struct Assignment {
    std::vector<std::size_t> labels;
    std::size_t k = 0;

    std::size_t size() const noexcept { return labels.size(); }

    /// Members per cluster.
    std::vector<std::size_t> sizes() const {
        std::vector<std::size_t> out(k, 0);
        for (auto label : labels) {
            ++out[label];
        }
        return out;
    }

    /// Throws InvalidArgument unless every label is below k.
    void check() const {
        for (auto label : labels) {
            if (label >= k) {
                throw InvalidArgument("assignment label out of range");
            }
        }
    }
};

} // namespace fuelclust
