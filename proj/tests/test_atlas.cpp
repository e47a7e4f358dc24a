#include <nlad/minimizer_atlas.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace nlad;

namespace {

bool has(const RegimeResult& r, SteadyClass c) { return (r.mask & class_bit(c)) != 0; }

const MinimumCandidate& candidate(const std::vector<MinimumCandidate>& v, SteadyClass c)
{
    return *std::find_if(v.begin(), v.end(), [&](const MinimumCandidate& m) { return m.cls == c; });
}

} // namespace

TEST(ScriptEnergy, Examples)
{
    EXPECT_NEAR(script_energy(ModelParams::unit_pair(0.8), 1.0, 1.0), 0.8, 1e-15);
    EXPECT_NEAR(script_energy(ModelParams::unit_pair(0.8), 2.0, 2.0), 2.0 * std::log(2.0), 1e-15);
    EXPECT_NEAR(script_energy(ModelParams::unit_pair(0.8, 0.2), 2.0, 2.0), 2.0 * std::log(2.0) + 0.4, 1e-15);
    EXPECT_THROW(script_energy(ModelParams::unit_pair(0.8), 0.5, 2.0), ValidationError);
}

TEST(CandidateMinima, Locations)
{
    const auto c = candidate_minima(ModelParams::unit_pair(1.0));
    EXPECT_DOUBLE_EQ(candidate(c, SteadyClass::S22).u1c, 2.0);
    EXPECT_DOUBLE_EQ(candidate(c, SteadyClass::S22).u2c, 2.0);
    EXPECT_DOUBLE_EQ(candidate(c, SteadyClass::H).u1c, 1.0);
    auto p = ModelParams::unit_pair(1.0);
    p.diffusion = {2.0, 1.0};
    const auto d = candidate_minima(p);
    EXPECT_DOUBLE_EQ(candidate(d, SteadyClass::S22).u1c, 1.5);
    EXPECT_DOUBLE_EQ(candidate(d, SteadyClass::S22).u2c, 3.0);
}

TEST(CandidateMinima, SegregatedThresholdIsOneHalf)
{
    for (int k = -40; k <= 40; ++k) {
        const double g = 0.5 + 0.0125 * k;
        if (k == 0) continue;
        EXPECT_EQ(candidate(candidate_minima(ModelParams::unit_pair(g)), SteadyClass::S22).local_min, g > 0.5) << g;
    }
    // general parameters: gamma_12 > D1 D2 L / (p1 D1 + p2 D2)
    ModelParams p = ModelParams::unit_pair(0.0);
    p.diffusion = {2.0, 0.5};
    p.mass = {1.5, 0.7};
    p.length = 1.3;
    const double thr = 2.0 * 0.5 * 1.3 / (1.5 * 2.0 + 0.7 * 0.5);
    for (double f : {0.9, 1.1}) {
        p.gamma[0][1] = p.gamma[1][0] = f * thr;
        EXPECT_EQ(candidate(candidate_minima(p), SteadyClass::S22).local_min, f > 1.0);
    }
}

TEST(CrossOver, SegregationBeatsHomogeneousPastScannedCrossover)
{
    // brute force: smallest gamma_12 whose minimum over the curve 1/u1 + 1/u2 = 1 undercuts M_H
    auto boundary_min = [](const ModelParams& p) {
        double best = INFINITY;
        for (int k = 1; k < 20000; ++k) {
            const double u1 = 1.0 + 1e-3 * k;
            best = std::min(best, script_energy(p, u1, u1 / (u1 - 1.0)));
        }
        return best;
    };
    double crossover = NAN;
    for (int k = 0; k <= 3000; ++k) {
        const double g = 1e-3 * k;
        const auto p = ModelParams::unit_pair(g);
        if (boundary_min(p) < script_energy(p, 1.0, 1.0)) {
            crossover = g;
            break;
        }
    }
    ASSERT_FALSE(std::isnan(crossover));
    EXPECT_NEAR(crossover, 2.0 * std::log(2.0), 2e-3);
    for (int k = 1; k <= 60; ++k) {
        const auto p = ModelParams::unit_pair(crossover + 0.01 * k);
        const auto c = candidate_minima(p);
        EXPECT_LT(candidate(c, SteadyClass::S22).energy, candidate(c, SteadyClass::H).energy);
    }
}

TEST(ClassifyRegime, PublishedPoints)
{
    using S = SteadyClass;
    EXPECT_EQ(classify_regime(0.2, 1.05).classes, (std::vector<S>{S::H, S::S22}));
    EXPECT_EQ(classify_regime(0.2, -1.05).classes, (std::vector<S>{S::H, S::AInf}));
    EXPECT_EQ(classify_regime(-0.15, 0.4).classes, (std::vector<S>{S::H, S::SInfInf, S::S1Inf}));
    EXPECT_EQ(classify_regime(-1.5, 0.5).classes, (std::vector<S>{S::SInfInf, S::S1Inf}));
    EXPECT_EQ(classify_regime(0.2, 0.2).classes, (std::vector<S>{S::H}));
}

TEST(ClassifyRegime, EveryCaseReached)
{
    const std::vector<std::tuple<double, double, RegimeCase>> pts{
        {0.5, 0.3, RegimeCase::A1},  {0.2, 1.05, RegimeCase::A2}, {0.2, -1.05, RegimeCase::B1},
        {-0.5, -0.8, RegimeCase::B2}, {-0.15, 0.4, RegimeCase::C1}, {-0.2, 0.6, RegimeCase::C2},
        {-0.8, 0.6, RegimeCase::C3},  {-1.5, 0.5, RegimeCase::C4}};
    for (const auto& [g11, g12, c] : pts) {
        const auto r = classify_regime(g11, g12);
        EXPECT_EQ(r.regime_case, c) << g11 << ' ' << g12;
        EXPECT_FALSE(r.boundary);
    }
}

TEST(ClassifyRegime, BoundariesAreFlagged)
{
    EXPECT_TRUE(classify_regime(0.0, 0.7).boundary);
    EXPECT_EQ(classify_regime(0.0, 0.7).regime_case, RegimeCase::A2);
    EXPECT_TRUE(classify_regime(0.5, 0.75).boundary);
    EXPECT_EQ(classify_regime(0.5, 0.75).regime_case, RegimeCase::A1);
    EXPECT_TRUE(classify_regime(-0.5, -0.5).boundary);
    EXPECT_EQ(classify_regime(-0.5, -0.5).regime_case, RegimeCase::B1);
    EXPECT_TRUE(classify_regime(-1.0, 0.5).boundary);
    EXPECT_TRUE(classify_regime(0.4, 0.0).boundary);
}

TEST(ClassifyRegime, AgreesWithCandidateVerdicts)
{
    for (int a = 0; a < 50; ++a) {
        for (int b = 0; b < 50; ++b) {
            const double g11 = -2.0 + 4.0 * (a + 0.5) / 50.0, g12 = -2.0 + 4.0 * (b + 0.5) / 50.0;
            const auto r = classify_regime(g11, g12);
            if (r.boundary) continue;
            const auto c = candidate_minima(ModelParams::unit_pair(g12, g11));
            EXPECT_EQ(has(r, SteadyClass::S22), candidate(c, SteadyClass::S22).local_min) << g11 << ' ' << g12;
            if (has(r, SteadyClass::H)) {
                EXPECT_TRUE(candidate(c, SteadyClass::H).local_min) << g11 << ' ' << g12;
            }
        }
    }
}

TEST(ClassifyRegime, RefusesOtherParameters)
{
    auto p = ModelParams::unit_pair(1.0);
    p.mass = {2.0, 1.0};
    EXPECT_THROW(classify_regime(p), ContractError);
    EXPECT_EQ(classify_regime(ModelParams::unit_pair(1.05, 0.2)).regime_case, RegimeCase::A2);
}

TEST(UnboundedDescent, SignOfCrossInteraction)
{
    EXPECT_TRUE(unbounded_descent_check(ModelParams::unit_pair(-0.5)));
    EXPECT_TRUE(unbounded_descent_check(ModelParams::unit_pair(-0.001)));
    EXPECT_FALSE(unbounded_descent_check(ModelParams::unit_pair(0.5)));
    EXPECT_FALSE(unbounded_descent_check(ModelParams::unit_pair(0.0)));
}

TEST(RegimeMap, CsvShape)
{
    std::ostringstream os;
    RegimeMapSpec s;
    s.n11 = 5;
    s.n12 = 7;
    write_regime_map_csv(os, s);
    std::istringstream is(os.str());
    std::string line;
    std::size_t rows = 0;
    bool header = false;
    while (std::getline(is, line)) {
        if (line[0] == '#') continue;
        if (!header) {
            EXPECT_EQ(line, "gamma12,gamma11,case,mask,boundary");
            header = true;
        } else {
            ++rows;
        }
    }
    EXPECT_EQ(rows, 35u);
}
