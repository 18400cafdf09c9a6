// Copyright 2026 The vqcs Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Pure- and mixed-state storage.
//
// Amplitudes are stored column-major with qubit 1 as the fastest (least
// significant) index: the amplitude at flat index k belongs to the basis
// state with bit sigma_j = (k >> (j-1)) & 1 for qubit j. A density matrix
// stores its 2^n x 2^n coefficients the same way, ket indices first
// (qubits 1..n) and bra indices second (qubits n+1..2n), so it can be
// reinterpreted in place as a 2n-qubit pseudo state.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vqcs/errors.hpp"
#include "vqcs/types.hpp"

namespace vqcs {

/// Flat index of the basis state with the given bits for qubits 1..n.
inline std::uint64_t basis_index(std::span<const int> bits) {
    std::uint64_t k = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) {
        if (bits[j] != 0 && bits[j] != 1) {
            throw DomainError("basis_index: bit " + std::to_string(j + 1) +
                              " is not 0 or 1");
        }
        k |= static_cast<std::uint64_t>(bits[j]) << j;
    }
    return k;
}

inline std::uint64_t basis_index(std::initializer_list<int> bits) {
    return basis_index(std::span<const int>(bits.begin(), bits.size()));
}

/// Live/peak counters over full-state amplitude buffers. Used by tests to
/// verify the memory contract of the gradient sweep.
struct AllocStats {
    std::int64_t live;
    std::int64_t peak;
};

namespace detail {

inline std::atomic<std::int64_t> &state_live_counter() {
    static std::atomic<std::int64_t> v{0};
    return v;
}

inline std::atomic<std::int64_t> &state_peak_counter() {
    static std::atomic<std::int64_t> v{0};
    return v;
}

inline void note_state_alloc() {
    const std::int64_t live = state_live_counter().fetch_add(1) + 1;
    auto &peak = state_peak_counter();
    std::int64_t seen = peak.load();
    while (seen < live && !peak.compare_exchange_weak(seen, live)) {
    }
}

inline void note_state_free() { state_live_counter().fetch_sub(1); }

/// Amplitude storage with allocation bookkeeping.
template <typename T> class AmpBuffer {
  public:
    AmpBuffer() = default;
    explicit AmpBuffer(std::size_t size) : v_(size) { note(); }
    explicit AmpBuffer(cvector<T> &&src) : v_(std::move(src)) { note(); }
    AmpBuffer(const AmpBuffer &o) : v_(o.v_) { note(); }
    AmpBuffer(AmpBuffer &&o) noexcept : v_(std::move(o.v_)) { o.v_.clear(); }
    AmpBuffer &operator=(const AmpBuffer &o) {
        if (this != &o) {
            release();
            v_ = o.v_;
            note();
        }
        return *this;
    }
    AmpBuffer &operator=(AmpBuffer &&o) noexcept {
        if (this != &o) {
            release();
            v_ = std::move(o.v_);
            o.v_.clear();
        }
        return *this;
    }
    ~AmpBuffer() { release(); }

    cvector<T> &vec() { return v_; }
    const cvector<T> &vec() const { return v_; }

  private:
    void note() {
        if (!v_.empty()) {
            note_state_alloc();
        }
    }
    void release() {
        if (!v_.empty()) {
            note_state_free();
        }
    }
    cvector<T> v_;
};

inline std::uint64_t checked_dim(int n, int max_qubits, const char *what) {
    if (n < 1) {
        throw SizeError(std::string(what) + ": qubit count must be >= 1, got " +
                        std::to_string(n));
    }
    if (n > max_qubits) {
        throw SizeError(std::string(what) + ": qubit count " + std::to_string(n) +
                        " exceeds the supported maximum of " +
                        std::to_string(max_qubits));
    }
    return std::uint64_t(1) << n;
}

inline int log2_exact(std::size_t len) {
    if (len < 2 || (len & (len - 1)) != 0) {
        return -1;
    }
    int n = 0;
    while ((std::size_t(1) << n) < len) {
        ++n;
    }
    return n;
}

} // namespace detail

inline AllocStats state_alloc_stats() {
    return {detail::state_live_counter().load(), detail::state_peak_counter().load()};
}

/// Resets the peak counter to the current live count.
inline void reset_state_alloc_peak() {
    detail::state_peak_counter().store(detail::state_live_counter().load());
}

/// Non-owning pure-state-shaped window onto amplitude storage.
template <typename T> struct PureStateView {
    std::span<cplx<T>> amplitudes;
    int num_qubits;
};

struct unchecked_t {
    explicit unchecked_t() = default;
};
inline constexpr unchecked_t unchecked{};

/// State vector of an n-qubit pure state: 2^n complex amplitudes.
template <typename T> class PureState {
  public:
    /// At most 2^kMaxQubits amplitudes (16 bytes each in double precision)
    /// may be allocated; larger requests throw SizeError up front.
    static constexpr int kMaxQubits = 40;

    /// All qubits in |0>.
    explicit PureState(int n)
        : n_(n), buf_(alloc(detail::checked_dim(n, kMaxQubits, "PureState"))) {
        buf_.vec()[0] = cplx<T>(1);
    }

    /// Wraps amplitudes after validating the shape and norm; inputs whose
    /// norm is within 1e-8 of 1 are renormalized, anything else is rejected.
    static PureState from_amplitudes(cvector<T> amps) {
        const int n = detail::log2_exact(amps.size());
        if (n < 0) {
            throw ShapeError("PureState::from_amplitudes: length " +
                             std::to_string(amps.size()) +
                             " is not a power of two >= 2");
        }
        double sq = 0;
        for (const auto &a : amps) {
            sq += static_cast<double>(std::norm(cplx<double>(a)));
        }
        const double nrm = std::sqrt(sq);
        if (nrm == 0) {
            throw DegenerateStateError(
                "PureState::from_amplitudes: zero vector cannot be normalized");
        }
        if (std::abs(nrm - 1.0) > 1e-8) {
            throw ValidityError("PureState::from_amplitudes: norm " +
                                std::to_string(nrm) + " is not within 1e-8 of 1");
        }
        const T inv = static_cast<T>(1.0 / nrm);
        for (auto &a : amps) {
            a *= inv;
        }
        return PureState(unchecked, std::move(amps));
    }

    /// Unchecked wrap of raw data (oracles and internal pseudo states);
    /// the length must be a power of two >= 2.
    PureState(unchecked_t, cvector<T> amps)
        : n_(detail::log2_exact(amps.size())), buf_(std::move(amps)) {
        if (n_ < 0) {
            throw ShapeError("PureState: raw length is not a power of two >= 2");
        }
    }

    int num_qubits() const { return n_; }
    std::uint64_t size() const { return buf_.vec().size(); }
    Precision precision() const { return precision_of<T>::value; }

    std::span<cplx<T>> amplitudes() { return buf_.vec(); }
    std::span<const cplx<T>> amplitudes() const { return buf_.vec(); }
    PureStateView<T> view() { return {amplitudes(), n_}; }

    cplx<T> &operator[](std::uint64_t k) { return buf_.vec()[k]; }
    const cplx<T> &operator[](std::uint64_t k) const { return buf_.vec()[k]; }

    double norm() const {
        double sq = 0;
        for (const auto &a : buf_.vec()) {
            sq += static_cast<double>(std::norm(cplx<double>(a)));
        }
        return std::sqrt(sq);
    }

  private:
    static detail::AmpBuffer<T> alloc(std::uint64_t dim) {
        try {
            return detail::AmpBuffer<T>(dim);
        } catch (const std::bad_alloc &) {
            throw SizeError("PureState: cannot allocate 2^" +
                            std::to_string(detail::log2_exact(dim)) + " amplitudes");
        }
    }

    int n_;
    detail::AmpBuffer<T> buf_;
};

/// Density matrix of an n-qubit mixed state: 4^n complex coefficients.
template <typename T> class MixedState {
  public:
    static constexpr int kMaxQubits = PureState<T>::kMaxQubits / 2;

    /// All qubits in |0><0|.
    explicit MixedState(int n)
        : n_(n), buf_(alloc(detail::checked_dim(n, kMaxQubits, "MixedState") *
                            detail::checked_dim(n, kMaxQubits, "MixedState"))) {
        buf_.vec()[0] = cplx<T>(1);
    }

    /// Wraps 4^n coefficients after validating trace (within 1e-8 of 1,
    /// then rescaled to exactly 1) and Hermiticity (within 1e-8).
    static MixedState from_entries(cvector<T> entries) {
        const int n2 = detail::log2_exact(entries.size());
        if (n2 < 0 || n2 % 2 != 0) {
            throw ShapeError("MixedState::from_entries: length " +
                             std::to_string(entries.size()) + " is not 4^n");
        }
        const int n = n2 / 2;
        const std::uint64_t dim = std::uint64_t(1) << n;
        cplx<double> tr = 0;
        for (std::uint64_t k = 0; k < dim; ++k) {
            tr += cplx<double>(entries[k + k * dim]);
        }
        if (std::abs(tr - 1.0) > 1e-8) {
            throw ValidityError("MixedState::from_entries: trace is not within "
                                "1e-8 of 1");
        }
        double herm = 0;
        for (std::uint64_t c = 0; c < dim; ++c) {
            for (std::uint64_t r = 0; r <= c; ++r) {
                const cplx<double> a(entries[r + c * dim]);
                const cplx<double> b(entries[c + r * dim]);
                herm = std::max(herm, std::abs(a - std::conj(b)));
            }
        }
        if (herm > 1e-8) {
            throw ValidityError("MixedState::from_entries: matrix is not "
                                "Hermitian within 1e-8");
        }
        const cplx<T> scale = static_cast<cplx<T>>(1.0 / tr);
        for (auto &e : entries) {
            e *= scale;
        }
        MixedState m(n);
        m.buf_.vec() = std::move(entries);
        return m;
    }

    int num_qubits() const { return n_; }
    std::uint64_t dim() const { return std::uint64_t(1) << n_; }
    std::uint64_t size() const { return buf_.vec().size(); }
    Precision precision() const { return precision_of<T>::value; }

    std::span<cplx<T>> entries() { return buf_.vec(); }
    std::span<const cplx<T>> entries() const { return buf_.vec(); }

    /// Matrix element (row = ket index, col = bra index).
    cplx<T> &at(std::uint64_t row, std::uint64_t col) {
        return buf_.vec()[row + col * dim()];
    }
    const cplx<T> &at(std::uint64_t row, std::uint64_t col) const {
        return buf_.vec()[row + col * dim()];
    }

    /// Reinterprets the storage as a 2n-qubit pseudo state. No data is
    /// copied; the view is not norm-checked.
    PureStateView<T> as_pure_view() { return {buf_.vec(), 2 * n_}; }

    std::complex<double> trace() const {
        cplx<double> tr = 0;
        const std::uint64_t d = dim();
        for (std::uint64_t k = 0; k < d; ++k) {
            tr += cplx<double>(buf_.vec()[k + k * d]);
        }
        return tr;
    }

  private:
    static detail::AmpBuffer<T> alloc(std::uint64_t dim2) {
        try {
            return detail::AmpBuffer<T>(dim2);
        } catch (const std::bad_alloc &) {
            throw SizeError("MixedState: cannot allocate density matrix");
        }
    }

    int n_;
    detail::AmpBuffer<T> buf_;
};

} // namespace vqcs
