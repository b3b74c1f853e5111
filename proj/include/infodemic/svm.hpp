#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace infodemic {

/// Binary RBF-kernel SVM trained with SMO. Labels are +1 (Fake) and -1 (Real).
struct SvmModel {
    std::vector<std::vector<double>> support_vectors;  // standardized space
    std::vector<double> coefficients;                  // alpha_i * y_i
    double bias = 0.0;
    double gamma = 0.0;
    double c = 1.0;
    std::vector<double> mean;
    std::vector<double> scale;  // 1 for constant features
    bool converged = true;
    std::size_t passes = 0;

    std::size_t dimension() const { return mean.size(); }
    std::vector<double> standardize(std::span<const double> x) const;
    /// f(x) = sum_i coef_i K(sv_i, x) + b, summed in support-vector order.
    double decision_value(std::span<const double> x) const;
};

struct SvmConfig {
    double c = 1000.0;
    std::optional<double> gamma;  // empty: 1 / feature count
    double tol = 1e-3;
    std::size_t max_passes = 100;
    std::uint64_t seed = 0;
};

/// Standardizes the features (zero mean, unit variance; constant columns map
/// to 0), then runs Platt's SMO. The first candidate partner for a KKT violator
/// is drawn at random from the seeded generator; when that makes no progress
/// the remaining points are tried from a random offset. Training stops when a
/// full sweep finds every point within `tol` of its KKT condition or after
/// `max_passes` sweeps (then `converged` is false).
SvmModel train_svm(const std::vector<std::vector<double>>& features, std::span<const int> labels,
                   const SvmConfig& config = {});

/// +1 for f(x) > 0, otherwise -1.
int svm_predict(const SvmModel& model, std::span<const double> x);

/// KKT residual check on training points, in the caller's (unstandardized) space.
struct KktReport {
    bool satisfied = true;
    double max_violation = 0.0;
    double dual_residual = 0.0;  // sum_i alpha_i y_i
};

/// Full dual solution from training, needed for the KKT audit.
struct SvmTraining {
    SvmModel model;
    std::vector<double> alpha;
};

SvmTraining train_svm_full(const std::vector<std::vector<double>>& features, std::span<const int> labels,
                           const SvmConfig& config = {});

KktReport check_kkt(const SvmTraining& training, const std::vector<std::vector<double>>& features,
                    std::span<const int> labels, double tol);

nlohmann::json to_json(const SvmModel& model);
SvmModel svm_from_json(const nlohmann::json& j);

}  // namespace infodemic
