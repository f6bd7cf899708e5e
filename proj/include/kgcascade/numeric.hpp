#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace kgc {

using cplx = std::complex<double>;

// Neumaier variant of compensated summation.
class KahanSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    KahanSum& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Centered hypercube {-H..H}^d stored row-major with offset H per axis.
// Shared by the lattice (H = N) and the NLS truncation box.
class CenteredBox {
public:
    CenteredBox() = default;
    CenteredBox(int half, int dim);

    int half() const { return half_; }
    int dim() const { return dim_; }
    int side() const { return 2 * half_ + 1; }
    std::size_t size() const { return size_; }

    // Flat index of the point n (each |n_i| <= H).
    std::size_t flat(const int* n) const;
    std::size_t flat(const std::vector<int>& n) const { return flat(n.data()); }
    // Inverse of flat(); writes dim() coordinates.
    void coords(std::size_t idx, int* n) const;
    std::vector<int> coords(std::size_t idx) const;
    bool contains(const int* n) const;
    // Flat index of -n.
    std::size_t mirror(std::size_t idx) const { return size_ - 1 - idx; }

    bool operator==(const CenteredBox& o) const { return half_ == o.half_ && dim_ == o.dim_; }
    bool operator!=(const CenteredBox& o) const { return !(*this == o); }

private:
    int half_ = 0;
    int dim_ = 0;
    std::size_t size_ = 0;
};

// |n| := max(1, Euclidean norm).
inline double weight_abs(const int* n, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += double(n[i]) * double(n[i]);
    return s < 1.0 ? 1.0 : std::sqrt(s);
}

inline double euclid(const int* n, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += double(n[i]) * double(n[i]);
    return std::sqrt(s);
}

// Integer power with exact repeated multiplication for small exponents.
inline double ipow(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

} // namespace kgc
