#include "kgcascade/numeric.hpp"

#include "kgcascade/errors.hpp"

namespace kgc {

CenteredBox::CenteredBox(int half, int dim) : half_(half), dim_(dim) {
    if (half < 0) throw ParameterError("box half-width must be non-negative");
    if (dim < 1 || dim > 3) throw ParameterError("dimension must be 1, 2 or 3");
    size_ = 1;
    for (int i = 0; i < dim; ++i) size_ *= std::size_t(side());
}

std::size_t CenteredBox::flat(const int* n) const {
    std::size_t idx = 0;
    const std::size_t s = std::size_t(side());
    for (int i = 0; i < dim_; ++i) idx = idx * s + std::size_t(n[i] + half_);
    return idx;
}

void CenteredBox::coords(std::size_t idx, int* n) const {
    const std::size_t s = std::size_t(side());
    for (int i = dim_ - 1; i >= 0; --i) {
        n[i] = int(idx % s) - half_;
        idx /= s;
    }
}

std::vector<int> CenteredBox::coords(std::size_t idx) const {
    std::vector<int> n(static_cast<std::size_t>(dim_));
    coords(idx, n.data());
    return n;
}

bool CenteredBox::contains(const int* n) const {
    for (int i = 0; i < dim_; ++i)
        if (n[i] < -half_ || n[i] > half_) return false;
    return true;
}

} // namespace kgc
