#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace infodemic {

/// Each point is assigned to its nearest centroid (ties to the lowest index) and
/// `inertia` is the sum of squared distances to the assigned centroids.
struct ClusterModel {
    std::size_t k = 0;
    std::vector<Eigen::VectorXd> centroids;
    std::vector<std::size_t> assignments;
    double inertia = 0.0;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> inertia_trace;  // one entry per assignment step, non-increasing
};

std::size_t distinct_point_count(const std::vector<Eigen::VectorXd>& points);

/// k-means++ seeding followed by Lloyd iterations. Errors when k is zero or
/// exceeds the number of distinct points.
ClusterModel kmeans(const std::vector<Eigen::VectorXd>& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters = 300);

}  // namespace infodemic
