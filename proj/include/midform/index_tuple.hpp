#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

namespace midform {

/// Strictly increasing tuple of 1-based coordinate indices.  Identifies one
/// basis monomial e^{i1} ^ ... ^ e^{ik}; the empty tuple is the degree-0
/// monomial.
using IndexTuple = std::vector<int>;

inline bool strictly_increasing(const IndexTuple& t) {
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i - 1] >= t[i]) return false;
    return true;
}

/// Sorts `t` in place and returns the sign of the sorting permutation,
/// or 0 if two entries coincide.
inline int sort_with_sign(IndexTuple& t) {
    int sign = 1;
    // insertion sort; tuples are short, and we need the exact transposition count
    for (std::size_t i = 1; i < t.size(); ++i) {
        int v = t[i];
        std::size_t j = i;
        while (j > 0 && t[j - 1] > v) {
            t[j] = t[j - 1];
            --j;
            sign = -sign;
        }
        t[j] = v;
        if (j > 0 && t[j - 1] == v) return 0;
    }
    return sign;
}

/// Position (0-based) of `idx` in the increasing tuple, or -1 if absent.
inline int tuple_find(const IndexTuple& t, int idx) {
    auto it = std::lower_bound(t.begin(), t.end(), idx);
    if (it == t.end() || *it != idx) return -1;
    return static_cast<int>(it - t.begin());
}

/// Removes position `pos` from the tuple.
inline IndexTuple tuple_erase(const IndexTuple& t, int pos) {
    IndexTuple r;
    r.reserve(t.size() - 1);
    for (int i = 0; i < static_cast<int>(t.size()); ++i)
        if (i != pos) r.push_back(t[i]);
    return r;
}

/// Inserts `idx` into the increasing tuple; returns the resulting position,
/// or -1 if `idx` is already present.
inline int tuple_insert(IndexTuple& t, int idx) {
    auto it = std::lower_bound(t.begin(), t.end(), idx);
    if (it != t.end() && *it == idx) return -1;
    int pos = static_cast<int>(it - t.begin());
    t.insert(it, idx);
    return pos;
}

/// Calls `fn` on every strictly increasing k-tuple drawn from 1..d, in
/// lexicographic order.
inline void for_each_tuple(int d, int k, const std::function<void(const IndexTuple&)>& fn) {
    if (k < 0 || k > d) return;
    IndexTuple t(k);
    for (int i = 0; i < k; ++i) t[i] = i + 1;
    if (k == 0) {
        fn(t);
        return;
    }
    while (true) {
        fn(t);
        int i = k - 1;
        while (i >= 0 && t[i] == d - (k - 1 - i)) --i;
        if (i < 0) break;
        ++t[i];
        for (int j = i + 1; j < k; ++j) t[j] = t[j - 1] + 1;
    }
}

inline std::vector<IndexTuple> all_tuples(int d, int k) {
    std::vector<IndexTuple> out;
    for_each_tuple(d, k, [&](const IndexTuple& t) { out.push_back(t); });
    return out;
}

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
    return r;
}

}  // namespace midform
