#pragma once

#include <cstddef>
#include <iterator>

#include "vsm/core/special.hpp"

namespace vsm {

/// All n-part compositions of m, starting at (m,0,...,0) and ending at
/// (0,...,0,m). Single pass, input-range semantics.
class CompositionRange {
public:
    CompositionRange(int m, int n) : m_(m), n_(n) {
        detail::require(m >= 0 && n >= 1, "enumerate_compositions: need m >= 0, n >= 1");
    }

    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = MultiIndex;
        using difference_type = std::ptrdiff_t;
        using pointer = const MultiIndex*;
        using reference = const MultiIndex&;

        iterator() = default;
        iterator(int m, int n) : done_(false) {
            cur_.k.assign(n, 0);
            cur_.k[0] = m;
            cur_.m = m;
        }
        reference operator*() const { return cur_; }
        pointer operator->() const { return &cur_; }
        iterator& operator++() {
            advance();
            return *this;
        }
        void operator++(int) { advance(); }
        bool operator==(const iterator& o) const { return done_ == o.done_ && (done_ || cur_ == o.cur_); }

    private:
        void advance() {
            auto& k = cur_.k;
            const int n = static_cast<int>(k.size());
            int j = n - 2;
            while (j >= 0 && k[j] == 0) --j;
            if (j < 0) {
                done_ = true;
                return;
            }
            int tail = 0;
            for (int i = j + 1; i < n; ++i) {
                tail += k[i];
                k[i] = 0;
            }
            --k[j];
            k[j + 1] = tail + 1;
        }
        MultiIndex cur_;
        bool done_ = true;
    };

    iterator begin() const { return iterator(m_, n_); }
    iterator end() const { return iterator(); }

private:
    int m_, n_;
};

inline CompositionRange enumerate_compositions(int m, int n) { return CompositionRange(m, n); }

}  // namespace vsm
