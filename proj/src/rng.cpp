#include "soslab/rng.hpp"

#include <algorithm>

#include "soslab/common.hpp"

namespace soslab {

std::vector<int> Rng::sample_subset(int n, int k) {
    if (k < 0 || k > n) throw ValidationError("sample_subset: k out of range");
    // partial Fisher-Yates on an index array
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < k; ++i) {
        int j = i + uniform_int(n - i);
        std::swap(idx[i], idx[j]);
    }
    std::vector<int> out(idx.begin(), idx.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace soslab
