#pragma once

#include <cstddef>
#include <vector>

#include "kgcascade/numeric.hpp"

namespace kgc {

// In-place multidimensional complex DFT over an owned buffer (FFTW backed).
// Any axis length is accepted; odd and prime lengths are handled natively.
// forward: X_k = sum_j x_j e^{-2 pi i j.k/n}, backward uses e^{+...}; both
// unnormalized.
class FftNd {
public:
    explicit FftNd(std::vector<int> dims);
    ~FftNd();
    FftNd(const FftNd&) = delete;
    FftNd& operator=(const FftNd&) = delete;
    FftNd(FftNd&&) noexcept;
    FftNd& operator=(FftNd&&) noexcept;

    cplx* data() { return buf_; }
    const cplx* data() const { return buf_; }
    std::size_t size() const { return size_; }
    const std::vector<int>& dims() const { return dims_; }

    void forward();
    void backward();

private:
    void release();

    std::vector<int> dims_;
    std::size_t size_ = 0;
    cplx* buf_ = nullptr;
    void* fwd_ = nullptr;
    void* bwd_ = nullptr;
};

// Unitary DFT on a centered box {-H..H}^d: data and modes are both indexed
// by centered coordinates, phase e^{-2 pi i j.k/(2H+1)}, normalization
// (2H+1)^{-1/2} per axis.
class CenteredDft {
public:
    explicit CenteredDft(const CenteredBox& box);

    const CenteredBox& box() const { return box_; }
    // Raw FFT storage position of centered index idx (same map for sites and modes).
    std::size_t raw_of(std::size_t idx) const { return perm_[idx]; }

    void forward(const cplx* in, cplx* out);
    void inverse(const cplx* in, cplx* out);
    std::vector<cplx> forward(const std::vector<cplx>& in);
    std::vector<cplx> inverse(const std::vector<cplx>& in);

    // Direct access for integrators that work in raw FFT order.
    FftNd& engine() { return fft_; }

private:
    CenteredBox box_;
    FftNd fft_;
    std::vector<std::size_t> perm_;
    double scale_;
};

} // namespace kgc
