#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "infodemic/evaluation.hpp"
#include "infodemic/random.hpp"
#include "infodemic/svm.hpp"
#include "infodemic/text.hpp"

using namespace infodemic;

namespace {

struct Dataset {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
};

Dataset xor_set() { return {{{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {1, 1, -1, -1}}; }

Dataset two_clusters(std::uint64_t seed, std::size_t per_class) {
    Rng rng(seed);
    Dataset d;
    for (std::size_t i = 0; i < per_class; ++i) {
        d.x.push_back({10 + 0.1 * rng.normal(), 10 + 0.1 * rng.normal()});
        d.y.push_back(1);
        d.x.push_back({-10 + 0.1 * rng.normal(), -10 + 0.1 * rng.normal()});
        d.y.push_back(-1);
    }
    return d;
}

double training_accuracy(const SvmModel& m, const Dataset& d) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < d.x.size(); ++i) ok += svm_predict(m, d.x[i]) == d.y[i];
    return static_cast<double>(ok) / static_cast<double>(d.x.size());
}

}  // namespace

TEST_CASE("svm: xor with rbf kernel") {
    const auto d = xor_set();
    const auto t = train_svm_full(d.x, d.y);
    CHECK(training_accuracy(t.model, d) == 1.0);
    CHECK(t.model.converged);
    // oracle: evaluate each decision value directly
    for (std::size_t i = 0; i < d.x.size(); ++i) CHECK(d.y[i] * t.model.decision_value(d.x[i]) > 0.0);
    const auto kkt = check_kkt(t, d.x, d.y, 1e-3);
    CHECK(kkt.satisfied);
    CHECK(std::abs(kkt.dual_residual) < 1e-6);
}

TEST_CASE("svm: separable clusters and class-mean prediction") {
    const auto d = two_clusters(1, 20);
    const auto m = train_svm(d.x, d.y);
    CHECK(training_accuracy(m, d) == 1.0);
    CHECK(svm_predict(m, std::vector<double>{10, 10}) == 1);
    CHECK(svm_predict(m, std::vector<double>{-10, -10}) == -1);
    CHECK(m.gamma == doctest::Approx(0.5));
}

TEST_CASE("svm: kkt, dual constraint and interior margins on noisy data") {
    Rng rng(9);
    Dataset d;
    for (int i = 0; i < 120; ++i) {
        const double a = rng.normal(), b = rng.normal(), c = rng.normal(), e = rng.normal(), f = rng.normal();
        d.x.push_back({a, b, c, e, f});
        d.y.push_back(a * a + b - 0.5 * c + 0.3 * rng.normal() > 0.8 ? 1 : -1);
    }
    SvmConfig cfg;
    cfg.c = 10.0;
    cfg.seed = 4;
    cfg.max_passes = 1000;
    const auto t = train_svm_full(d.x, d.y, cfg);
    REQUIRE(t.model.converged);
    const auto kkt = check_kkt(t, d.x, d.y, 1e-3);
    CHECK(kkt.satisfied);
    CHECK(kkt.max_violation == 0.0);
    CHECK(std::abs(kkt.dual_residual) < 1e-6);
    std::size_t interior = 0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        CHECK(t.alpha[i] >= 0.0);
        CHECK(t.alpha[i] <= cfg.c);
        if (t.alpha[i] > 0.0 && t.alpha[i] < cfg.c) {
            ++interior;
            CHECK(std::abs(std::abs(t.model.decision_value(d.x[i])) - 1.0) <= 1e-3);
        }
    }
    CHECK(interior > 0);
}

TEST_CASE("svm: determinism") {
    const auto d = two_clusters(3, 15);
    SvmConfig cfg;
    cfg.seed = 21;
    const auto a = train_svm(d.x, d.y, cfg);
    const auto b = train_svm(d.x, d.y, cfg);
    CHECK(a.support_vectors == b.support_vectors);
    REQUIRE(a.coefficients.size() == b.coefficients.size());
    for (std::size_t i = 0; i < a.coefficients.size(); ++i) CHECK(std::abs(a.coefficients[i] - b.coefficients[i]) < 1e-9);
}

TEST_CASE("svm: contract errors") {
    const auto d = xor_set();
    const auto m = train_svm(d.x, d.y);
    CHECK_THROWS_AS(svm_predict(m, std::vector<double>{1, 2, 3, 4}), Error);
    const std::vector<int> one_class{1, 1, 1, 1};
    CHECK_THROWS_AS(train_svm(d.x, one_class), Error);
    SvmConfig bad;
    bad.c = 0.0;
    CHECK_THROWS_AS(train_svm(d.x, d.y, bad), Error);
}

TEST_CASE("svm: constant feature and json round trip") {
    Dataset d = two_clusters(5, 10);
    for (auto& row : d.x) row.push_back(7.0);
    const auto m = train_svm(d.x, d.y);
    CHECK(m.scale[2] == 1.0);
    CHECK(training_accuracy(m, d) == 1.0);
    const auto back = svm_from_json(to_json(m));
    for (const auto& row : d.x) CHECK(back.decision_value(row) == m.decision_value(row));
}

TEST_CASE("svm: identity standardization leaves the decision unchanged") {
    const auto d = two_clusters(6, 10);
    auto m = train_svm(d.x, d.y);
    const std::vector<double> probe{0.3, -0.2};
    const auto z = m.standardize(probe);
    SvmModel id = m;
    id.mean.assign(2, 0.0);
    id.scale.assign(2, 1.0);
    CHECK(id.decision_value(z) == doctest::Approx(m.decision_value(probe)).epsilon(1e-12));
}

TEST_CASE("svm: max_passes cap reports non-convergence") {
    Rng rng(2);
    Dataset d;
    for (int i = 0; i < 60; ++i) {
        d.x.push_back({rng.normal(), rng.normal()});
        d.y.push_back(rng.index(2) ? 1 : -1);
    }
    SvmConfig cfg;
    cfg.max_passes = 1;
    const auto m = train_svm(d.x, d.y, cfg);
    CHECK_FALSE(m.converged);
    CHECK(m.passes == 1);
}

TEST_CASE("evaluate") {
    std::vector<Label> gold(10, Label::Fake), comp(10, Label::Real);
    for (int i = 0; i < 5; ++i) gold[i] = Label::Real, comp[i] = Label::Fake;
    CHECK(evaluate(gold, gold).accuracy == 1.0);
    CHECK(evaluate(comp, gold).accuracy == 0.0);

    std::vector<Label> g100(100, Label::Fake), p100(100, Label::Fake);
    for (int i = 0; i < 50; ++i) g100[i] = p100[i] = Label::Real;
    for (int i = 0; i < 5; ++i) p100[i] = Label::Fake;
    const auto r = evaluate(p100, g100);
    CHECK(r.accuracy == doctest::Approx(0.95));
    CHECK(r.tp + r.fp + r.tn + r.fn == 100);
    CHECK(r.fp == 5);
    CHECK(r.tp == 50);
    CHECK_THROWS_AS(evaluate(std::vector<Label>{}, std::vector<Label>{}), Error);
    CHECK_THROWS_AS(evaluate(std::vector<Label>{Label::Fake}, std::vector<Label>{}), Error);
}

TEST_CASE("property: accuracy is one minus normalized hamming distance") {
    Rng rng(10);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + rng.index(50);
        std::vector<Label> a(n), b(n);
        std::size_t diff = 0;
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.index(2) ? Label::Fake : Label::Real;
            b[i] = rng.index(2) ? Label::Fake : Label::Real;
            diff += a[i] != b[i];
        }
        CHECK(evaluate(a, b).accuracy == doctest::Approx(1.0 - static_cast<double>(diff) / n));
        const auto e1 = agreement_ensemble(a, b, a);
        const auto e2 = agreement_ensemble(b, a, a);
        CHECK(e1.n_agreed == e2.n_agreed);
        CHECK(e1.n_agreed_correct == e2.n_agreed_correct);
    }
}

TEST_CASE("cross_validate with a constant classifier") {
    std::vector<std::pair<std::string, Label>> rows;
    for (int i = 0; i < 25; ++i) rows.push_back({"f", Label::Fake});
    for (int i = 0; i < 25; ++i) rows.push_back({"r", Label::Real});
    const auto c = testing::make_corpus(rows);
    const auto plan = make_folds(c, 5, 1);
    Trainer constant = [](const Corpus&, std::span<const std::size_t>, std::size_t) -> Predictor {
        return [](const Corpus&, std::size_t) { return Label::Fake; };
    };
    const auto cv = cross_validate(constant, c, plan);
    REQUIRE(cv.folds.size() == 5);
    double sum = 0.0;
    for (std::size_t f = 0; f < 5; ++f) {
        const auto test = plan.test_indices(c, f);
        std::size_t fake = 0;
        for (auto i : test) fake += c.posts[i].label == Label::Fake;
        CHECK(cv.folds[f].accuracy == doctest::Approx(static_cast<double>(fake) / test.size()));
        CHECK(cv.folds[f].n == test.size());
        sum += cv.folds[f].accuracy;
    }
    CHECK(cv.mean_accuracy == doctest::Approx(sum / 5));
    CHECK(std::all_of(cv.scored.begin(), cv.scored.end(), [](bool s) { return s; }));
}

TEST_CASE("cross_validate propagates trainer failures with the fold") {
    const auto c = testing::make_corpus({{"a", Label::Fake}, {"b", Label::Real}, {"c", Label::Fake}, {"d", Label::Real}});
    const auto plan = make_folds(c, 2, 0);
    Trainer failing = [](const Corpus&, std::span<const std::size_t>, std::size_t fold) -> Predictor {
        if (fold == 1) throw Error("boom");
        return [](const Corpus&, std::size_t) { return Label::Real; };
    };
    try {
        cross_validate(failing, c, plan);
        FAIL("expected failure");
    } catch (const Error& e) {
        CHECK(std::string(e.what()) == "fold 1: boom");
    }
}

TEST_CASE("cross-corpus evaluation") {
    const auto train = testing::make_corpus({{"x", Label::Fake}, {"y", Label::Real}});
    const auto test = testing::make_corpus({{"x", Label::Fake}, {"y", Label::Real}, {"x", Label::Real}});
    Trainer lookup = [](const Corpus& tc, std::span<const std::size_t> idx, std::size_t) -> Predictor {
        std::map<std::string, Label> memory;
        for (auto i : idx) memory[tc.posts[i].text] = tc.posts[i].label;
        return [memory](const Corpus& c, std::size_t i) { return memory.at(c.posts[i].text); };
    };
    CHECK(cross_corpus_evaluate(lookup, train, test).accuracy == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("agreement ensemble") {
    std::vector<Label> a(8560), b(8560), gold(8560);
    for (std::size_t i = 0; i < 8560; ++i) {
        gold[i] = i % 2 ? Label::Fake : Label::Real;
        a[i] = gold[i];
        b[i] = i < 6705 ? a[i] : (a[i] == Label::Fake ? Label::Real : Label::Fake);
        if (i < 6705 - 6514) a[i] = b[i] = (gold[i] == Label::Fake ? Label::Real : Label::Fake);
    }
    const auto r = agreement_ensemble(a, b, gold);
    CHECK(r.n_agreed == 6705);
    CHECK(r.n_agreed_correct == 6514);
    CHECK(std::abs(r.agreed_accuracy - 0.9715) < 1e-4);
    CHECK(std::abs(r.coverage - 0.7833) < 1e-4);

    const auto all = agreement_ensemble(gold, gold, gold);
    CHECK(all.agreed_accuracy == 1.0);
    CHECK(all.coverage == 1.0);
    std::vector<Label> flipped(gold.size());
    for (std::size_t i = 0; i < gold.size(); ++i) flipped[i] = gold[i] == Label::Fake ? Label::Real : Label::Fake;
    const auto none = agreement_ensemble(gold, flipped, gold);
    CHECK(none.n_agreed == 0);
    CHECK(none.empty);
    CHECK(none.agreed_accuracy == 0.0);
    CHECK_THROWS_AS(agreement_ensemble(gold, std::vector<Label>{}, gold), Error);
}
