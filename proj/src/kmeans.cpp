#include "infodemic/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "infodemic/random.hpp"
#include "infodemic/text.hpp"

namespace infodemic {

namespace {

std::size_t nearest(const std::vector<Eigen::VectorXd>& centroids, const Eigen::VectorXd& p, double* d2_out) {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d2 = (centroids[c] - p).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = c;
        }
    }
    if (d2_out) *d2_out = best_d2;
    return best;
}

std::vector<Eigen::VectorXd> plus_plus_init(const std::vector<Eigen::VectorXd>& points, std::size_t k, Rng& rng) {
    std::vector<Eigen::VectorXd> centroids;
    centroids.push_back(points[rng.index(points.size())]);
    std::vector<double> d2(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) d2[i] = (points[i] - centroids[0]).squaredNorm();
    while (centroids.size() < k) {
        double total = 0.0;
        for (double v : d2) total += v;
        const double u = rng.uniform() * total;
        double acc = 0.0;
        std::size_t pick = points.size();
        for (std::size_t i = 0; i < points.size(); ++i) {
            acc += d2[i];
            if (d2[i] > 0.0 && u < acc) {
                pick = i;
                break;
            }
        }
        if (pick == points.size()) {
            // rounding pushed u past the last positive weight
            for (std::size_t i = points.size(); i-- > 0;) {
                if (d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(points[pick]);
        for (std::size_t i = 0; i < points.size(); ++i) {
            d2[i] = std::min(d2[i], (points[i] - centroids.back()).squaredNorm());
        }
    }
    return centroids;
}

void update_centroids(const std::vector<Eigen::VectorXd>& points, std::vector<std::size_t>& assignments,
                      std::vector<Eigen::VectorXd>& centroids) {
    const std::size_t k = centroids.size();
    auto recompute = [&](std::size_t c) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(points.front().size());
        std::size_t n = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (assignments[i] == c) {
                sum += points[i];
                ++n;
            }
        }
        if (n > 0) centroids[c] = sum / static_cast<double>(n);
        return n;
    };
    std::vector<std::size_t> sizes(k);
    for (std::size_t c = 0; c < k; ++c) sizes[c] = recompute(c);
    for (std::size_t empty = 0; empty < k; ++empty) {
        if (sizes[empty] > 0) continue;
        const auto largest = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
        std::size_t far = points.size();
        double far_d2 = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (assignments[i] != largest) continue;
            const double d2 = (points[i] - centroids[largest]).squaredNorm();
            if (d2 > far_d2) {
                far_d2 = d2;
                far = i;
            }
        }
        assignments[far] = empty;
        centroids[empty] = points[far];
        sizes[empty] = 1;
        sizes[largest] = recompute(largest);
    }
}

}  // namespace

std::size_t distinct_point_count(const std::vector<Eigen::VectorXd>& points) {
    std::vector<std::vector<double>> rows;
    rows.reserve(points.size());
    for (const auto& p : points) rows.emplace_back(p.data(), p.data() + p.size());
    std::sort(rows.begin(), rows.end());
    return static_cast<std::size_t>(std::unique(rows.begin(), rows.end()) - rows.begin());
}

ClusterModel kmeans(const std::vector<Eigen::VectorXd>& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters) {
    if (k == 0) throw Error("kmeans: k must be at least 1");
    if (points.empty()) throw Error("kmeans: no points");
    for (const auto& p : points) {
        if (p.size() != points.front().size()) throw Error("kmeans: points differ in dimension");
        if (!p.allFinite()) throw Error("kmeans: points contain non-finite values");
    }
    const std::size_t distinct = distinct_point_count(points);
    if (k > distinct) {
        throw Error("kmeans: k = " + std::to_string(k) + " exceeds the " + std::to_string(distinct) +
                    " distinct points");
    }

    Rng rng(seed);
    ClusterModel model;
    model.k = k;
    model.seed = seed;
    model.centroids = plus_plus_init(points, k, rng);
    std::vector<std::size_t> assignments;
    std::vector<std::size_t> next(points.size());
    for (std::size_t iter = 1; iter <= std::max<std::size_t>(1, max_iters); ++iter) {
        double inertia = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double d2 = 0.0;
            next[i] = nearest(model.centroids, points[i], &d2);
            inertia += d2;
        }
        model.inertia_trace.push_back(inertia);
        model.inertia = inertia;
        model.iterations = iter;
        if (next == assignments) {
            model.converged = true;
            break;
        }
        assignments = next;
        if (iter == max_iters) break;
        update_centroids(points, assignments, model.centroids);
    }
    model.assignments = std::move(assignments);
    return model;
}

}  // namespace infodemic
