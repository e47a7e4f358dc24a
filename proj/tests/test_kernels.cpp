#include <nlad/kernels.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

using namespace nlad;

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 40)
{
    const double c = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fc = f(c);
    const double whole = (b - a) / 6.0 * (fa + 4 * fc + fb);
    std::function<double(double, double, double, double, double, double, double, int)> rec =
        [&](double a, double b, double fa, double fb, double fc, double whole, double tol, int d) {
            const double c = 0.5 * (a + b), l = 0.5 * (a + c), r = 0.5 * (c + b);
            const double fl = f(l), fr = f(r);
            const double left = (c - a) / 6.0 * (fa + 4 * fl + fc);
            const double right = (b - c) / 6.0 * (fc + 4 * fr + fb);
            if (d <= 0 || std::abs(left + right - whole) <= 15 * tol)
                return left + right + (left + right - whole) / 15.0;
            return rec(a, c, fa, fc, fl, left, tol / 2, d - 1) + rec(c, b, fc, fb, fr, right, tol / 2, d - 1);
        };
    return rec(a, b, fa, fb, fc, whole, tol, depth);
}

// Exact convolution of the trigonometric interpolant of f with the top-hat, by direct
// evaluation of the interpolant's antiderivative: (P(x+a) - P(x-a)) / (2a).
std::vector<double> direct_tophat_convolution(const std::vector<double>& f, double alpha, double L)
{
    const std::size_t m = f.size();
    const double tau = 2 * std::numbers::pi;
    std::vector<double> re(m / 2 + 1), im(m / 2 + 1);
    for (std::size_t q = 0; q <= m / 2; ++q)
        for (std::size_t k = 0; k < m; ++k) {
            re[q] += f[k] * std::cos(tau * q * k / m) / m;
            im[q] -= f[k] * std::sin(tau * q * k / m) / m;
        }
    const double h = L / m;
    auto antiderivative = [&](double x) {
        double s = re[0] * x;
        for (std::size_t q = 1; q <= m / 2; ++q) {
            const double kq = tau * q / L;
            const double y = kq * (x - 0.5 * h);
            if (q == m / 2) {
                s += re[q] * std::sin(y) / kq;
            } else {
                s += 2.0 * (re[q] * std::sin(y) + im[q] * std::cos(y)) / kq;
            }
        }
        return s;
    };
    std::vector<double> out(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double x = (k + 0.5) * h;
        out[k] = (antiderivative(x + alpha) - antiderivative(x - alpha)) / (2 * alpha);
    }
    return out;
}

} // namespace

TEST(Kernels, TopHatValuesAndWrap)
{
    const auto k = KernelSpec::top_hat(0.025);
    EXPECT_DOUBLE_EQ(kernel_eval(k, 0.0, 1.0), 20.0);
    EXPECT_DOUBLE_EQ(kernel_eval(k, 0.5, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(kernel_eval(k, 0.99, 1.0), 20.0);
    EXPECT_DOUBLE_EQ(kernel_eval(k, -0.02, 1.0), 20.0);
}

TEST(Kernels, UnitMassByQuadrature)
{
    for (double a : {0.1, 0.05, 0.025}) {
        const auto k = KernelSpec::top_hat(a);
        double s = adaptive_simpson([&](double x) { return kernel_eval(k, x, 1.0); }, -0.5, -a, 1e-12) +
                   adaptive_simpson([&](double x) { return kernel_eval(k, x, 1.0); }, -a, a, 1e-12) +
                   adaptive_simpson([&](double x) { return kernel_eval(k, x, 1.0); }, a, 0.5, 1e-12);
        EXPECT_NEAR(s, 1.0, 1e-10);
    }
}

TEST(Kernels, SymbolMatchesQuadrature)
{
    const double a = 0.1, kappa = 2 * std::numbers::pi;
    const auto k = KernelSpec::top_hat(a);
    const double quad =
        adaptive_simpson([&](double x) { return std::cos(kappa * x) / (2 * a); }, -a, a, 1e-14);
    EXPECT_NEAR(kernel_fourier(k, kappa), quad, 1e-12);
    EXPECT_NEAR(kernel_fourier(k, kappa), 0.935489283788639, 1e-12);
}

TEST(Kernels, DeltaSymbolIsOne)
{
    for (double kappa : {0.0, 1.0, 100.0}) EXPECT_EQ(kernel_fourier(KernelSpec::delta(), kappa), 1.0);
    EXPECT_THROW(kernel_eval(KernelSpec::delta(), 0.0, 1.0), UnsupportedError);
}

TEST(Kernels, SymbolIsEvenAndSmallArgumentSmooth)
{
    const auto k = KernelSpec::top_hat(0.05);
    for (double kappa : {0.3, 6.0, 77.0}) EXPECT_DOUBLE_EQ(kernel_fourier(k, kappa), kernel_fourier(k, -kappa));
    EXPECT_NEAR(kernel_fourier(k, 1e-3 / 0.05 * 0.99), std::sin(0.99e-3) / 0.99e-3, 1e-15);
}

TEST(Kernels, RejectsBadWidths)
{
    EXPECT_THROW(validate_kernel(KernelSpec::top_hat(0.0), 1.0), ValidationError);
    EXPECT_THROW(validate_kernel(KernelSpec::top_hat(-1.0), 1.0), ValidationError);
    EXPECT_THROW(validate_kernel(KernelSpec::top_hat(0.5), 1.0), ValidationError);
    EXPECT_NO_THROW(validate_kernel(KernelSpec::top_hat(0.49), 1.0));
}

TEST(Kernels, ConvolutionMatchesDirectSummation)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 2.0);
    for (std::size_t m : {64u, 128u}) {
        Grid g(m, 1.0);
        std::vector<double> f(m);
        for (auto& v : f) v = uni(rng);
        for (double a : {0.1, 0.0371}) {
            const auto fast = periodic_convolve(f, KernelSpec::top_hat(a), g);
            const auto slow = direct_tophat_convolution(f, a, 1.0);
            double scale = 0.0, err = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                scale = std::max(scale, std::abs(slow[k]));
                err = std::max(err, std::abs(fast[k] - slow[k]));
            }
            EXPECT_LT(err / scale, 1e-8) << "M=" << m << " alpha=" << a;
        }
    }
}

TEST(Kernels, ConvolutionPreservesMassAndConstants)
{
    Grid g(128, 2.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> f(128), c(128, 3.5);
    for (auto& v : f) v = uni(rng);
    const auto k = KernelSpec::top_hat(0.3);
    const auto kf = periodic_convolve(f, k, g);
    double a = 0, b = 0;
    for (std::size_t i = 0; i < 128; ++i) {
        a += f[i];
        b += kf[i];
    }
    EXPECT_NEAR(a, b, 1e-12 * a);
    for (double v : periodic_convolve(c, k, g)) EXPECT_NEAR(v, 3.5, 1e-13);
    EXPECT_EQ(periodic_convolve(f, KernelSpec::delta(), g), f);
}

TEST(Kernels, ShrinkingWidthApproachesIdentity)
{
    Grid g(512, 1.0);
    std::vector<double> f(512);
    for (std::size_t k = 0; k < 512; ++k) f[k] = 1.0 + 0.5 * std::sin(2 * std::numbers::pi * g.x(k));
    double last = INFINITY;
    for (double a : {0.1, 0.05, 0.025}) {
        const auto kf = periodic_convolve(f, KernelSpec::top_hat(a), g);
        double err = 0.0;
        for (std::size_t k = 0; k < 512; ++k) err = std::max(err, std::abs(kf[k] - f[k]));
        EXPECT_LT(err, last);
        last = err;
    }
}

TEST(Kernels, LengthMismatchThrows)
{
    Grid g(32, 1.0);
    EXPECT_THROW(periodic_convolve(std::vector<double>(16), KernelSpec::top_hat(0.1), g), DimensionError);
}
