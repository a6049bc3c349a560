#pragma once

#include <cstddef>
#include <vector>

namespace tailcovar {

/// n paired loss observations (x_i, y_i); x is the institution, y the system.
struct PairedSample {
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const noexcept { return x.size(); }
};

}  // namespace tailcovar
