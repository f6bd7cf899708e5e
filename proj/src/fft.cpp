#include "kgcascade/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

#include "kgcascade/errors.hpp"

namespace kgc {

namespace {
// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

FftNd::FftNd(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw StructuralError("FFT needs at least one axis");
    size_ = 1;
    for (int n : dims_) {
        if (n < 1) throw StructuralError("FFT axis length must be positive");
        size_ *= std::size_t(n);
    }
    std::lock_guard<std::mutex> lock(planner_mutex());
    buf_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * size_));
    if (!buf_) throw std::bad_alloc();
    auto* b = reinterpret_cast<fftw_complex*>(buf_);
    const int rank = int(dims_.size());
    fwd_ = fftw_plan_dft(rank, dims_.data(), b, b, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft(rank, dims_.data(), b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
    std::memset(static_cast<void*>(buf_), 0, sizeof(fftw_complex) * size_);
}

FftNd::~FftNd() { release(); }

FftNd::FftNd(FftNd&& o) noexcept
    : dims_(std::move(o.dims_)), size_(o.size_), buf_(o.buf_), fwd_(o.fwd_), bwd_(o.bwd_) {
    o.buf_ = nullptr;
    o.fwd_ = o.bwd_ = nullptr;
    o.size_ = 0;
}

FftNd& FftNd::operator=(FftNd&& o) noexcept {
    if (this != &o) {
        release();
        dims_ = std::move(o.dims_);
        size_ = o.size_;
        buf_ = o.buf_;
        fwd_ = o.fwd_;
        bwd_ = o.bwd_;
        o.buf_ = nullptr;
        o.fwd_ = o.bwd_ = nullptr;
        o.size_ = 0;
    }
    return *this;
}

void FftNd::release() {
    if (!buf_ && !fwd_ && !bwd_) return;
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    if (buf_) fftw_free(buf_);
    buf_ = nullptr;
    fwd_ = bwd_ = nullptr;
}

void FftNd::forward() { fftw_execute(static_cast<fftw_plan>(fwd_)); }
void FftNd::backward() { fftw_execute(static_cast<fftw_plan>(bwd_)); }

CenteredDft::CenteredDft(const CenteredBox& box)
    : box_(box), fft_(std::vector<int>(std::size_t(box.dim()), box.side())) {
    perm_.resize(box_.size());
    const int n = box_.side();
    std::vector<int> c(std::size_t(box_.dim()));
    for (std::size_t idx = 0; idx < box_.size(); ++idx) {
        box_.coords(idx, c.data());
        std::size_t raw = 0;
        for (int i = 0; i < box_.dim(); ++i) raw = raw * std::size_t(n) + std::size_t((c[i] + n) % n);
        perm_[idx] = raw;
    }
    scale_ = std::pow(double(n), -0.5 * box_.dim());
}

void CenteredDft::forward(const cplx* in, cplx* out) {
    cplx* b = fft_.data();
    for (std::size_t i = 0; i < perm_.size(); ++i) b[perm_[i]] = in[i];
    fft_.forward();
    for (std::size_t i = 0; i < perm_.size(); ++i) out[i] = b[perm_[i]] * scale_;
}

void CenteredDft::inverse(const cplx* in, cplx* out) {
    cplx* b = fft_.data();
    for (std::size_t i = 0; i < perm_.size(); ++i) b[perm_[i]] = in[i];
    fft_.backward();
    for (std::size_t i = 0; i < perm_.size(); ++i) out[i] = b[perm_[i]] * scale_;
}

std::vector<cplx> CenteredDft::forward(const std::vector<cplx>& in) {
    if (in.size() != box_.size()) throw StructuralError("DFT input size does not match the box");
    std::vector<cplx> out(in.size());
    forward(in.data(), out.data());
    return out;
}

std::vector<cplx> CenteredDft::inverse(const std::vector<cplx>& in) {
    if (in.size() != box_.size()) throw StructuralError("DFT input size does not match the box");
    std::vector<cplx> out(in.size());
    inverse(in.data(), out.data());
    return out;
}

} // namespace kgc
