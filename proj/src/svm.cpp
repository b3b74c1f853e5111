#include "infodemic/svm.hpp"

#include <algorithm>
#include <cmath>

#include "infodemic/random.hpp"
#include "infodemic/text.hpp"

namespace infodemic {

namespace {

constexpr std::size_t kMaxCachedRows = 3000;

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

class Smo {
public:
    Smo(std::vector<std::vector<double>> x, std::span<const int> y, const SvmConfig& cfg, double gamma)
        : x_(std::move(x)), y_(y.begin(), y.end()), cfg_(cfg), gamma_(gamma), rng_(cfg.seed),
          alpha_(x_.size(), 0.0), error_(x_.size()) {
        const std::size_t n = x_.size();
        if (n <= kMaxCachedRows) {
            cache_.resize(n * n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i; j < n; ++j) cache_[i * n + j] = cache_[j * n + i] = rbf(x_[i], x_[j], gamma_);
            }
        }
        for (std::size_t i = 0; i < n; ++i) error_[i] = -static_cast<double>(y_[i]);
    }

    void run() {
        const std::size_t n = x_.size();
        while (passes_ < cfg_.max_passes) {
            ++passes_;
            std::size_t violators = 0;
            std::size_t changed = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!violates(i)) continue;
                ++violators;
                if (examine(i)) ++changed;
            }
            if (violators == 0) {
                // the incremental error cache drifts; confirm on exact values
                refresh_errors();
                if (!any_violator()) {
                    converged_ = true;
                    return;
                }
            } else if (changed == 0) {
                refresh_errors();
            }
        }
        refresh_errors();
        converged_ = !any_violator();
    }

    const std::vector<double>& alpha() const { return alpha_; }
    double bias() const { return b_; }
    bool converged() const { return converged_; }
    std::size_t passes() const { return passes_; }

private:
    bool any_violator() const {
        for (std::size_t i = 0; i < x_.size(); ++i) {
            if (violates(i)) return true;
        }
        return false;
    }

    double kernel(std::size_t i, std::size_t j) const {
        if (!cache_.empty()) return cache_[i * x_.size() + j];
        return rbf(x_[i], x_[j], gamma_);
    }

    bool violates(std::size_t i) const {
        const double r = y_[i] * error_[i];
        return (r < -cfg_.tol && alpha_[i] < cfg_.c) || (r > cfg_.tol && alpha_[i] > 0.0);
    }

    bool examine(std::size_t i) {
        const std::size_t n = x_.size();
        if (n < 2) return false;
        std::size_t j = rng_.index(n - 1);
        if (j >= i) ++j;
        if (take_step(i, j)) return true;
        const std::size_t start = rng_.index(n);
        for (std::size_t t = 0; t < n; ++t) {
            const std::size_t k = (start + t) % n;
            if (k != j && take_step(i, k)) return true;
        }
        return false;
    }

    bool take_step(std::size_t i, std::size_t j) {
        if (i == j) return false;
        const double ai = alpha_[i], aj = alpha_[j];
        const double yi = y_[i], yj = y_[j];
        const double ei = error_[i], ej = error_[j];
        const double s = yi * yj;
        const double C = cfg_.c;
        double lo, hi;
        if (yi != yj) {
            lo = std::max(0.0, aj - ai);
            hi = std::min(C, C + aj - ai);
        } else {
            lo = std::max(0.0, ai + aj - C);
            hi = std::min(C, ai + aj);
        }
        if (hi - lo <= 0.0) return false;
        const double kii = kernel(i, i), kjj = kernel(j, j), kij = kernel(i, j);
        const double eta = kii + kjj - 2.0 * kij;
        double aj_new;
        if (eta > 1e-12) {
            aj_new = std::clamp(aj + yj * (ei - ej) / eta, lo, hi);
        } else {
            // flat direction: move to the better end of the segment
            const double f1 = yi * (ei - b_) - ai * kii - s * aj * kij;
            const double f2 = yj * (ej - b_) - s * ai * kij - aj * kjj;
            auto objective = [&](double a2) {
                const double a1 = ai + s * (aj - a2);
                return a1 * f1 + a2 * f2 + 0.5 * a1 * a1 * kii + 0.5 * a2 * a2 * kjj + s * a1 * a2 * kij;
            };
            const double obj_lo = objective(lo), obj_hi = objective(hi);
            if (obj_lo < obj_hi - 1e-12) {
                aj_new = lo;
            } else if (obj_lo > obj_hi + 1e-12) {
                aj_new = hi;
            } else {
                return false;
            }
        }
        if (std::abs(aj_new - aj) < 1e-12 * (aj_new + aj + 1e-12)) return false;
        double ai_new = ai + s * (aj - aj_new);
        ai_new = std::clamp(ai_new, 0.0, C);

        const double dai = ai_new - ai, daj = aj_new - aj;
        const double b1 = b_ - ei - yi * dai * kii - yj * daj * kij;
        const double b2 = b_ - ej - yi * dai * kij - yj * daj * kjj;
        double b_new;
        if (ai_new > 0.0 && ai_new < C) {
            b_new = b1;
        } else if (aj_new > 0.0 && aj_new < C) {
            b_new = b2;
        } else {
            b_new = 0.5 * (b1 + b2);
        }
        const double db = b_new - b_;
        for (std::size_t k = 0; k < x_.size(); ++k) {
            error_[k] += yi * dai * kernel(i, k) + yj * daj * kernel(j, k) + db;
        }
        alpha_[i] = ai_new;
        alpha_[j] = aj_new;
        b_ = b_new;
        return true;
    }

    void refresh_errors() {
        const std::size_t n = x_.size();
        for (std::size_t k = 0; k < n; ++k) {
            double f = b_;
            for (std::size_t i = 0; i < n; ++i) {
                if (alpha_[i] > 0.0) f += alpha_[i] * y_[i] * kernel(i, k);
            }
            error_[k] = f - y_[k];
        }
    }

    std::vector<std::vector<double>> x_;
    std::vector<int> y_;
    SvmConfig cfg_;
    double gamma_;
    Rng rng_;
    std::vector<double> alpha_;
    std::vector<double> error_;
    std::vector<double> cache_;
    double b_ = 0.0;
    bool converged_ = false;
    std::size_t passes_ = 0;
};

}  // namespace

std::vector<double> SvmModel::standardize(std::span<const double> x) const {
    if (x.size() != mean.size()) {
        throw Error("svm: expected a " + std::to_string(mean.size()) + "-dimensional feature vector, got " +
                    std::to_string(x.size()));
    }
    std::vector<double> out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = (x[k] - mean[k]) / scale[k];
    return out;
}

double SvmModel::decision_value(std::span<const double> x) const {
    const auto z = standardize(x);
    double f = bias;
    for (std::size_t i = 0; i < support_vectors.size(); ++i) {
        f += coefficients[i] * rbf(support_vectors[i], z, gamma);
    }
    return f;
}

int svm_predict(const SvmModel& model, std::span<const double> x) { return model.decision_value(x) > 0.0 ? 1 : -1; }

SvmTraining train_svm_full(const std::vector<std::vector<double>>& features, std::span<const int> labels,
                           const SvmConfig& config) {
    if (features.size() != labels.size()) throw Error("train_svm: features and labels differ in length");
    if (!(config.c > 0.0)) throw Error("train_svm: C must be positive");
    if (config.gamma && !(*config.gamma > 0.0)) throw Error("train_svm: gamma must be positive");
    const bool has_pos = std::count(labels.begin(), labels.end(), 1) > 0;
    const bool has_neg = std::count(labels.begin(), labels.end(), -1) > 0;
    if (std::any_of(labels.begin(), labels.end(), [](int y) { return y != 1 && y != -1; })) {
        throw Error("train_svm: labels must be +1 or -1");
    }
    if (!has_pos || !has_neg) throw Error("train_svm: need at least one example of each class");
    const std::size_t d = features.front().size();
    if (d == 0) throw Error("train_svm: feature vectors are empty");
    for (const auto& row : features) {
        if (row.size() != d) throw Error("train_svm: feature vectors differ in dimension");
    }

    SvmModel model;
    model.c = config.c;
    model.gamma = config.gamma.value_or(1.0 / static_cast<double>(d));
    model.mean.assign(d, 0.0);
    model.scale.assign(d, 1.0);
    const double n = static_cast<double>(features.size());
    for (const auto& row : features) {
        for (std::size_t k = 0; k < d; ++k) model.mean[k] += row[k] / n;
    }
    for (std::size_t k = 0; k < d; ++k) {
        double var = 0.0;
        for (const auto& row : features) var += (row[k] - model.mean[k]) * (row[k] - model.mean[k]);
        var /= n;
        // rounding noise from a constant column stays below this relative floor
        const bool constant = var <= 1e-20 * std::max(1.0, model.mean[k] * model.mean[k]);
        model.scale[k] = constant ? 1.0 : std::sqrt(var);
    }
    std::vector<std::vector<double>> z;
    z.reserve(features.size());
    for (const auto& row : features) z.push_back(model.standardize(row));

    Smo smo(z, labels, config, model.gamma);
    smo.run();
    const auto& alpha = smo.alpha();
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] > 0.0) {
            model.support_vectors.push_back(z[i]);
            model.coefficients.push_back(alpha[i] * labels[i]);
        }
    }
    model.bias = smo.bias();
    model.converged = smo.converged();
    model.passes = smo.passes();
    return {std::move(model), alpha};
}

SvmModel train_svm(const std::vector<std::vector<double>>& features, std::span<const int> labels,
                   const SvmConfig& config) {
    return train_svm_full(features, labels, config).model;
}

KktReport check_kkt(const SvmTraining& training, const std::vector<std::vector<double>>& features,
                    std::span<const int> labels, double tol) {
    KktReport report;
    const double C = training.model.c;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double a = training.alpha[i];
        const double yf = labels[i] * training.model.decision_value(features[i]);
        double violation = 0.0;
        if (a <= 0.0) {
            violation = std::max(0.0, (1.0 - yf) - tol);
        } else if (a >= C) {
            violation = std::max(0.0, (yf - 1.0) - tol);
        } else {
            violation = std::max(0.0, std::abs(yf - 1.0) - tol);
        }
        report.max_violation = std::max(report.max_violation, violation);
        report.dual_residual += a * labels[i];
    }
    report.satisfied = report.max_violation == 0.0;
    return report;
}

nlohmann::json to_json(const SvmModel& m) {
    return {{"format", "infodemic-svm"},
            {"version", 1},
            {"kernel", "rbf"},
            {"gamma", m.gamma},
            {"C", m.c},
            {"bias", m.bias},
            {"mean", m.mean},
            {"scale", m.scale},
            {"support_vectors", m.support_vectors},
            {"coefficients", m.coefficients},
            {"converged", m.converged},
            {"passes", m.passes}};
}

SvmModel svm_from_json(const nlohmann::json& j) {
    if (j.at("format") != "infodemic-svm" || j.at("version") != 1) throw Error("not an svm model (version 1)");
    SvmModel m;
    m.gamma = j.at("gamma");
    m.c = j.at("C");
    m.bias = j.at("bias");
    m.mean = j.at("mean").get<std::vector<double>>();
    m.scale = j.at("scale").get<std::vector<double>>();
    m.support_vectors = j.at("support_vectors").get<std::vector<std::vector<double>>>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    m.converged = j.at("converged");
    m.passes = j.at("passes");
    if (m.coefficients.size() != m.support_vectors.size() || m.mean.size() != m.scale.size()) {
        throw Error("svm model: inconsistent array sizes");
    }
    return m;
}

}  // namespace infodemic
