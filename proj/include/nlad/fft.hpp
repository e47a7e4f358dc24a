#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace nlad {

using cplx = std::complex<double>;

namespace detail {
inline std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}
} // namespace detail

// Real <-> half-complex transforms of one fixed length. The inverse is normalised.
// Plans use FFTW_ESTIMATE so results do not depend on planner timing.
class RealFft {
public:
    explicit RealFft(std::size_t m) : m_(m), real_(m), spec_(m / 2 + 1)
    {
        std::lock_guard<std::mutex> lock(detail::planner_mutex());
        auto* r = real_.data();
        auto* c = reinterpret_cast<fftw_complex*>(spec_.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(m), r, c, flags);
        inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(m), c, r, flags);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    ~RealFft()
    {
        std::lock_guard<std::mutex> lock(detail::planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }

    std::size_t size() const { return m_; }
    std::size_t spectrum_size() const { return m_ / 2 + 1; }

    void forward(const double* in, cplx* out) const
    {
        std::memcpy(real_.data(), in, m_ * sizeof(double));
        fftw_execute_dft_r2c(fwd_, real_.data(), reinterpret_cast<fftw_complex*>(out));
    }

    void inverse(const cplx* in, double* out) const
    {
        std::memcpy(spec_.data(), in, spectrum_size() * sizeof(cplx));
        fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(spec_.data()), out);
        const double s = 1.0 / static_cast<double>(m_);
        for (std::size_t k = 0; k < m_; ++k) out[k] *= s;
    }

    std::vector<cplx> forward(const std::vector<double>& in) const
    {
        std::vector<cplx> out(spectrum_size());
        forward(in.data(), out.data());
        return out;
    }

    std::vector<double> inverse(const std::vector<cplx>& in) const
    {
        std::vector<double> out(m_);
        inverse(in.data(), out.data());
        return out;
    }

private:
    std::size_t m_;
    mutable std::vector<double> real_;
    mutable std::vector<cplx> spec_;
    fftw_plan fwd_ = nullptr;
    fftw_plan inv_ = nullptr;
};

// Per-thread cache, one transform object per length.
inline const RealFft& fft_for(std::size_t m)
{
    thread_local std::map<std::size_t, std::unique_ptr<RealFft>> cache;
    auto& slot = cache[m];
    if (!slot) slot = std::make_unique<RealFft>(m);
    return *slot;
}

} // namespace nlad
