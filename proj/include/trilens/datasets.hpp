/// @file  datasets.hpp
/// @brief Synthetic dataset generators used by the experiment harness.

#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "trilens/errors.hpp"
#include "trilens/oracle.hpp"
#include "trilens/rng.hpp"

namespace trilens {

struct GaussianComponent {
    double weight;
    std::vector<double> mean;
    std::vector<double> covariance;  // m-by-m, row-major
};

/// A generated point cloud together with the per-point source label
/// (mixture component, moon index, or planted-outlier marker).
struct GeneratedDataset {
    std::shared_ptr<PointCloudOracle> oracle;
    std::vector<std::int32_t> labels;
};

namespace detail {

/// Cholesky factor (lower triangular, row-major) or BadCovariance.
inline std::vector<double> cholesky(const std::vector<double>& cov, std::uint32_t m) {
    std::vector<double> L(static_cast<std::size_t>(m) * m, 0.0);
    for (std::uint32_t i = 0; i < m; ++i) {
        for (std::uint32_t j = i + 1; j < m; ++j) {
            if (cov[i * m + j] != cov[j * m + i]) {
                throw BadCovariance("covariance matrix is not symmetric");
            }
        }
        for (std::uint32_t j = 0; j <= i; ++j) {
            double sum = cov[i * m + j];
            for (std::uint32_t k = 0; k < j; ++k) sum -= L[i * m + k] * L[j * m + k];
            if (i == j) {
                if (!(sum > 0.0)) throw BadCovariance("covariance matrix is not positive definite");
                L[i * m + i] = std::sqrt(sum);
            } else {
                L[i * m + j] = sum / L[j * m + j];
            }
        }
    }
    return L;
}

}  // namespace detail

/// Samples `count` points from a Gaussian mixture. Component weights must
/// be positive and sum to one; covariances symmetric positive definite.
/// Labels record the source component.
inline GeneratedDataset gen_gaussian_mixture(const std::vector<GaussianComponent>& components,
                                             std::size_t count, std::uint64_t seed) {
    if (components.empty()) throw Error("mixture needs at least one component");
    const std::uint32_t m = static_cast<std::uint32_t>(components.front().mean.size());
    double weight_sum = 0.0;
    std::vector<std::vector<double>> factors;
    for (const GaussianComponent& comp : components) {
        if (!(comp.weight > 0.0)) throw Error("mixture weights must be positive");
        if (comp.mean.size() != m || comp.covariance.size() != static_cast<std::size_t>(m) * m) {
            throw SizeMismatch("mixture component dimensions disagree");
        }
        weight_sum += comp.weight;
        factors.push_back(detail::cholesky(comp.covariance, m));
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) throw Error("mixture weights must sum to one");

    SplitMix64 rng(seed);
    std::vector<double> coords;
    coords.reserve(count * m);
    std::vector<std::int32_t> labels;
    labels.reserve(count);
    std::vector<double> z(m);
    for (std::size_t p = 0; p < count; ++p) {
        const double u = rng.next_double();
        std::size_t comp = components.size() - 1;
        double cum = 0.0;
        for (std::size_t c = 0; c < components.size(); ++c) {
            cum += components[c].weight;
            if (u < cum) {
                comp = c;
                break;
            }
        }
        for (std::uint32_t k = 0; k < m; ++k) z[k] = rng.next_gaussian();
        const std::vector<double>& L = factors[comp];
        for (std::uint32_t i = 0; i < m; ++i) {
            double x = components[comp].mean[i];
            for (std::uint32_t k = 0; k <= i; ++k) x += L[i * m + k] * z[k];
            coords.push_back(x);
        }
        labels.push_back(static_cast<std::int32_t>(comp));
    }
    return {std::make_shared<PointCloudOracle>(std::move(coords), m), std::move(labels)};
}

/// Two interleaved half-annuli. Moon 0 is the upward arc centered at the
/// origin; moon 1 the downward arc centered at (radius, -offset). Angles
/// are uniform on [0, pi], radii uniform in [radius - width, radius +
/// width]. Points alternate moons for exact balance.
inline GeneratedDataset gen_two_moons(std::size_t count, double radius, double width,
                                      double offset, std::uint64_t seed) {
    if (count < 2) throw Error("two-moons needs at least two points");
    SplitMix64 rng(seed);
    std::vector<double> coords;
    coords.reserve(count * 2);
    std::vector<std::int32_t> labels;
    labels.reserve(count);
    for (std::size_t p = 0; p < count; ++p) {
        const std::int32_t moon = static_cast<std::int32_t>(p % 2);
        const double theta = rng.next_double() * 3.14159265358979323846;
        const double r = radius + (rng.next_double() * 2.0 - 1.0) * width;
        if (moon == 0) {
            coords.push_back(r * std::cos(theta));
            coords.push_back(r * std::sin(theta));
        } else {
            coords.push_back(radius + r * std::cos(theta));
            coords.push_back(-offset - r * std::sin(theta));
        }
        labels.push_back(moon);
    }
    return {std::make_shared<PointCloudOracle>(std::move(coords), 2), std::move(labels)};
}

/// Standard Gaussian cloud with `outliers` extra points planted on a ring
/// far outside the bulk. Outliers are labeled 1, regular points 0.
inline GeneratedDataset gen_gaussian_with_outliers(std::size_t count, std::size_t outliers,
                                                   double ring_radius, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> coords;
    coords.reserve((count + outliers) * 2);
    std::vector<std::int32_t> labels;
    for (std::size_t p = 0; p < count; ++p) {
        coords.push_back(rng.next_gaussian());
        coords.push_back(rng.next_gaussian());
        labels.push_back(0);
    }
    for (std::size_t p = 0; p < outliers; ++p) {
        const double angle = rng.next_double() * 6.283185307179586;
        const double r = ring_radius * (1.0 + 0.2 * rng.next_double());
        coords.push_back(r * std::cos(angle));
        coords.push_back(r * std::sin(angle));
        labels.push_back(1);
    }
    return {std::make_shared<PointCloudOracle>(std::move(coords), 2), std::move(labels)};
}

}  // namespace trilens
