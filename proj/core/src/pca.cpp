#include "ropecloth/pca.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "ropecloth/errors.hpp"

namespace ropecloth {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

PcaModel fit_pca(const std::vector<std::vector<double>>& samples, std::size_t k) {
    if (samples.empty()) throw ConfigError("fit_pca: no samples");
    const std::size_t d = samples[0].size();
    const std::size_t n = samples.size();
    for (const auto& s : samples)
        if (s.size() != d) throw ConfigError("fit_pca: inconsistent sample dimensions");
    if (k > std::min(n, d)) throw ConfigError("fit_pca: k exceeds min(sample count, dim)");

    PcaModel model;
    model.dim = d;
    model.components = k;
    model.mean.assign(d, 0.0);
    for (const auto& s : samples)
        for (std::size_t i = 0; i < d; ++i) model.mean[i] += s[i];
    for (double& m : model.mean) m /= static_cast<double>(n);

    // Columns of A are the centered samples; one-sided Jacobi orthogonalizes
    // them in place, after which column norms are the singular values and
    // normalized columns the left singular vectors.
    std::vector<std::vector<double>> cols(n, std::vector<double>(d));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < d; ++i) cols[j][i] = samples[j][i] - model.mean[i];

    const double tol = 1e-14;
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double app = dot(cols[p], cols[p]);
                const double aqq = dot(cols[q], cols[q]);
                const double apq = dot(cols[p], cols[q]);
                if (std::abs(apq) <= tol * std::sqrt(app * aqq) || apq == 0.0) continue;
                rotated = true;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < d; ++i) {
                    const double vp = cols[p][i];
                    const double vq = cols[q][i];
                    cols[p][i] = c * vp - s * vq;
                    cols[q][i] = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(dot(cols[j], cols[j]));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

    model.basis.assign(d * k, 0.0);
    model.singular_values.assign(k, 0.0);
    const double rank_floor = std::max(sigma[order[0]], 1.0) * 1e-12;
    std::size_t filled = 0;
    for (std::size_t j = 0; j < n && filled < k; ++j) {
        const std::size_t src = order[j];
        if (sigma[src] <= rank_floor) break;
        double* col = model.basis.data() + filled * d;
        for (std::size_t i = 0; i < d; ++i) col[i] = cols[src][i] / sigma[src];
        model.singular_values[filled] = sigma[src];
        ++filled;
    }

    // Rank deficit: pad with an orthonormal complement built from standard
    // basis vectors (deterministic Gram-Schmidt).
    if (filled < k) {
        model.rank_padded = true;
        for (std::size_t e = 0; e < d && filled < k; ++e) {
            std::vector<double> v(d, 0.0);
            v[e] = 1.0;
            for (std::size_t j = 0; j < filled; ++j) {
                const double proj = dot(v, model.column(j));
                const double* col = model.basis.data() + j * d;
                for (std::size_t i = 0; i < d; ++i) v[i] -= proj * col[i];
            }
            const double norm = std::sqrt(dot(v, v));
            if (norm < 1e-6) continue;
            double* col = model.basis.data() + filled * d;
            for (std::size_t i = 0; i < d; ++i) col[i] = v[i] / norm;
            ++filled;
        }
    }

    // Deterministic sign: make the largest-magnitude entry of each column
    // positive (first occurrence wins on ties).
    for (std::size_t j = 0; j < k; ++j) {
        double* col = model.basis.data() + j * d;
        std::size_t arg = 0;
        for (std::size_t i = 1; i < d; ++i)
            if (std::abs(col[i]) > std::abs(col[arg])) arg = i;
        if (col[arg] < 0.0)
            for (std::size_t i = 0; i < d; ++i) col[i] = -col[i];
    }
    return model;
}

void pca_project(const PcaModel& model, std::span<const double> d,
                 std::span<double> coeffs) {
    assert(d.size() == model.dim && coeffs.size() == model.components);
    for (std::size_t j = 0; j < model.components; ++j) {
        const double* col = model.basis.data() + j * model.dim;
        double s = 0.0;
        for (std::size_t i = 0; i < model.dim; ++i) s += col[i] * (d[i] - model.mean[i]);
        coeffs[j] = s;
    }
}

void pca_reconstruct(const PcaModel& model, std::span<const double> coeffs,
                     std::span<double> out) {
    assert(out.size() == model.dim && coeffs.size() == model.components);
    std::copy(model.mean.begin(), model.mean.end(), out.begin());
    for (std::size_t j = 0; j < model.components; ++j) {
        const double* col = model.basis.data() + j * model.dim;
        const double c = coeffs[j];
        for (std::size_t i = 0; i < model.dim; ++i) out[i] += c * col[i];
    }
}

}  // namespace ropecloth
