#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ropecloth {

/// Mean plus orthonormal basis over flat displacement vectors. Columns are
/// ordered by decreasing singular value and carry a deterministic sign (the
/// largest-magnitude entry of each column is positive), so repeated fits of
/// the same data are bit-identical.
struct PcaModel {
    std::size_t dim = 0;
    std::size_t components = 0;
    std::vector<double> mean;             // dim
    std::vector<double> basis;            // dim x components, column-major
    std::vector<double> singular_values;  // components
    bool rank_padded = false;  // k exceeded the data rank; tail columns are
                               // an orthonormal complement with sigma = 0

    std::span<const double> column(std::size_t j) const {
        return {basis.data() + j * dim, dim};
    }
};

/// Thin SVD of the centered sample matrix via one-sided Jacobi; deterministic
/// sweep order, no randomness.
PcaModel fit_pca(const std::vector<std::vector<double>>& samples, std::size_t k);

/// coeffs = basis^T (d - mean)
void pca_project(const PcaModel& model, std::span<const double> d,
                 std::span<double> coeffs);

/// out = mean + basis * coeffs
void pca_reconstruct(const PcaModel& model, std::span<const double> coeffs,
                     std::span<double> out);

}  // namespace ropecloth
