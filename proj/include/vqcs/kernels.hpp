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

// Gate and channel application kernels.
//
// Two paths exist for pure states: a straightforward tensor-contraction
// reference (apply_gate_naive) and a cache-friendly path that aggregates
// eight coupled amplitude groups into one small matrix-matrix product per
// batch (apply_gate_fast). The outer iteration runs over disjoint segments
// of the compressed base-index space, so segments can execute on separate
// threads with every amplitude written exactly once per gate.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "vqcs/gates.hpp"
#include "vqcs/state.hpp"
#include "vqcs/threading.hpp"

namespace vqcs {

/// Qubit positions below this index count as cache-local when classifying
/// a two-qubit contraction. Tunable; the default suits a 32 KiB L1.
inline constexpr int kAggregationThreshold = 5;

/// Batch width: number of coupled amplitude groups aggregated into one
/// inner matrix-matrix product.
inline constexpr std::size_t kAggregationBatch = 8;

enum class AggregationCase {
    BothLow,  // every target below the threshold
    Mixed,    // targets straddle the threshold
    BothHigh, // every target at or above the threshold
};

/// Half-open range of compressed base indices (indices with all target bits
/// cleared, enumerated with the target bits squeezed out).
struct Segment {
    std::uint64_t begin;
    std::uint64_t end;
};

struct ApplyPlan {
    int num_qubits = 0;
    int num_targets = 0;
    std::uint64_t num_bases = 0; // 2^(n - num_targets)
    AggregationCase agg = AggregationCase::BothLow;
    std::size_t batch = kAggregationBatch;
    std::vector<std::uint64_t> sorted_strides; // ascending target strides
    std::vector<Segment> segments;             // disjoint cover of [0, num_bases)
};

namespace detail {

inline void check_targets_fit(std::span<const int> positions, int n) {
    for (int p : positions) {
        if (p < 1 || p > n) {
            throw IndexError("gate position " + std::to_string(p) +
                             " does not fit a " + std::to_string(n) +
                             "-qubit state");
        }
    }
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            if (positions[i] == positions[j]) {
                throw ValidityError("duplicate gate position " +
                                    std::to_string(positions[i]));
            }
        }
    }
}

inline std::vector<std::uint64_t> target_strides_sorted(std::span<const int> positions) {
    std::vector<std::uint64_t> s;
    s.reserve(positions.size());
    for (int p : positions) {
        s.push_back(std::uint64_t(1) << (p - 1));
    }
    std::sort(s.begin(), s.end());
    return s;
}

/// Offsets of the 2^m coupled amplitudes relative to a base index, in the
/// listed position order (first listed position = local bit 0).
inline std::vector<std::uint64_t> group_offsets(std::span<const int> positions) {
    const std::size_t m = positions.size();
    const std::size_t d = std::size_t(1) << m;
    std::vector<std::uint64_t> off(d, 0);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t k = 0; k < m; ++k) {
            if ((r >> k) & 1) {
                off[r] += std::uint64_t(1) << (positions[k] - 1);
            }
        }
    }
    return off;
}

/// Scatters the bits of a compressed index around the target strides.
inline std::uint64_t expand_index(std::uint64_t c,
                                  std::span<const std::uint64_t> sorted_strides) {
    for (const std::uint64_t s : sorted_strides) {
        c = ((c & ~(s - 1)) << 1) | (c & (s - 1));
    }
    return c;
}

} // namespace detail

/// Builds the deterministic segment decomposition for applying an operation
/// on the given target positions of an n-qubit state.
inline ApplyPlan plan_apply(std::span<const int> positions, int n,
                            const ThreadConfig &cfg,
                            int threshold = kAggregationThreshold) {
    detail::check_targets_fit(positions, n);
    ApplyPlan plan;
    plan.num_qubits = n;
    plan.num_targets = static_cast<int>(positions.size());
    plan.num_bases = std::uint64_t(1) << (n - plan.num_targets);
    plan.sorted_strides = detail::target_strides_sorted(positions);

    bool any_low = false, any_high = false;
    for (int p : positions) {
        (p < threshold ? any_low : any_high) = true;
    }
    plan.agg = any_low && any_high ? AggregationCase::Mixed
               : any_low           ? AggregationCase::BothLow
                                   : AggregationCase::BothHigh;

    const std::uint64_t state_size = std::uint64_t(1) << n;
    // Keep at least max(batch, 2^12 amplitudes) of work per segment.
    const std::uint64_t grain = std::max<std::uint64_t>(
        plan.batch, (std::uint64_t(1) << 12) >> plan.num_targets);
    std::uint64_t workers = 1;
    if (state_size >= cfg.min_work_per_thread && cfg.num_threads > 1) {
        workers = std::min<std::uint64_t>(cfg.num_threads, plan.num_bases / grain);
        workers = std::max<std::uint64_t>(workers, 1);
    }
    plan.segments.reserve(workers);
    std::uint64_t prev = 0;
    for (std::uint64_t w = 1; w <= workers; ++w) {
        std::uint64_t cut = plan.num_bases * w / workers;
        cut -= cut % plan.batch;
        if (w == workers) {
            cut = plan.num_bases;
        }
        if (cut > prev) {
            plan.segments.push_back({prev, cut});
            prev = cut;
        }
    }
    return plan;
}

namespace detail {

template <typename Body> void for_each_segment(const ApplyPlan &plan, Body &&body) {
    run_indexed(plan.segments.size(), static_cast<int>(plan.segments.size()),
                [&](std::size_t i) { body(plan.segments[i], i); });
}

// ---- generic m-qubit gather/scatter (also the m >= 3 fallback) ----

template <typename T>
void apply_dense_range(cplx<T> *a, const cplx<T> *mat, std::size_t d,
                       std::span<const std::uint64_t> offsets,
                       std::span<const std::uint64_t> strides, std::uint64_t cb,
                       std::uint64_t ce) {
    std::vector<cplx<T>> in(d), out(d);
    for (std::uint64_t c = cb; c < ce; ++c) {
        const std::uint64_t b = expand_index(c, strides);
        for (std::size_t r = 0; r < d; ++r) {
            in[r] = a[b + offsets[r]];
        }
        for (std::size_t r = 0; r < d; ++r) {
            cplx<T> acc = mat[r] * in[0];
            for (std::size_t s = 1; s < d; ++s) {
                acc += mat[r + s * d] * in[s];
            }
            out[r] = acc;
        }
        for (std::size_t r = 0; r < d; ++r) {
            a[b + offsets[r]] = out[r];
        }
    }
}

// ---- aggregated single-qubit kernel: 2x2 times 2x8 per batch ----

template <typename T>
void apply_1q_range(cplx<T> *a, const cplx<T> *m, std::uint64_t s, std::uint64_t cb,
                    std::uint64_t ce) {
    const cplx<T> m00 = m[0], m10 = m[1], m01 = m[2], m11 = m[3];
    if (s >= kAggregationBatch) {
        // Pair halves are contiguous runs of at least the batch width.
        for (std::uint64_t c0 = cb; c0 < ce; c0 += kAggregationBatch) {
            const std::uint64_t b0 = ((c0 & ~(s - 1)) << 1) | (c0 & (s - 1));
            cplx<T> *p = a + b0;
            cplx<T> *q = p + s;
            for (std::size_t k = 0; k < kAggregationBatch; ++k) {
                const cplx<T> a0 = p[k], a1 = q[k];
                p[k] = m00 * a0 + m01 * a1;
                q[k] = m10 * a0 + m11 * a1;
            }
        }
    } else {
        // Low target: batches live inside contiguous 2*batch-element tiles.
        std::uint64_t dk[kAggregationBatch];
        for (std::size_t k = 0; k < kAggregationBatch; ++k) {
            dk[k] = ((k & ~(s - 1)) << 1) | (k & (s - 1));
        }
        for (std::uint64_t c0 = cb; c0 < ce; c0 += kAggregationBatch) {
            const std::uint64_t b0 = ((c0 & ~(s - 1)) << 1) | (c0 & (s - 1));
            for (std::size_t k = 0; k < kAggregationBatch; ++k) {
                const std::uint64_t i = b0 + dk[k];
                const cplx<T> a0 = a[i], a1 = a[i + s];
                a[i] = m00 * a0 + m01 * a1;
                a[i + s] = m10 * a0 + m11 * a1;
            }
        }
    }
}

// ---- aggregated two-qubit kernel: 4x4 times 4x8 per batch ----

template <typename T>
void apply_2q_range(cplx<T> *a, const cplx<T> *m, std::uint64_t off1,
                    std::uint64_t off2, std::span<const std::uint64_t> strides,
                    AggregationCase agg, std::uint64_t cb, std::uint64_t ce) {
    const std::uint64_t off3 = off1 + off2;
    const cplx<T> m00 = m[0], m10 = m[1], m20 = m[2], m30 = m[3];
    const cplx<T> m01 = m[4], m11 = m[5], m21 = m[6], m31 = m[7];
    const cplx<T> m02 = m[8], m12 = m[9], m22 = m[10], m32 = m[11];
    const cplx<T> m03 = m[12], m13 = m[13], m23 = m[14], m33 = m[15];
    if (agg == AggregationCase::BothHigh) {
        // All four group runs are contiguous across the batch.
        for (std::uint64_t c0 = cb; c0 < ce; c0 += kAggregationBatch) {
            const std::uint64_t b0 = expand_index(c0, strides);
            cplx<T> *p0 = a + b0;
            cplx<T> *p1 = p0 + off1;
            cplx<T> *p2 = p0 + off2;
            cplx<T> *p3 = p0 + off3;
            for (std::size_t k = 0; k < kAggregationBatch; ++k) {
                const cplx<T> a0 = p0[k], a1 = p1[k], a2 = p2[k], a3 = p3[k];
                p0[k] = m00 * a0 + m01 * a1 + m02 * a2 + m03 * a3;
                p1[k] = m10 * a0 + m11 * a1 + m12 * a2 + m13 * a3;
                p2[k] = m20 * a0 + m21 * a1 + m22 * a2 + m23 * a3;
                p3[k] = m30 * a0 + m31 * a1 + m32 * a2 + m33 * a3;
            }
        }
    } else {
        // Low or mixed targets: the batch's bases follow a fixed offset
        // pattern inside one or two cache tiles.
        std::uint64_t dk[kAggregationBatch];
        for (std::size_t k = 0; k < kAggregationBatch; ++k) {
            dk[k] = expand_index(k, strides);
        }
        for (std::uint64_t c0 = cb; c0 < ce; c0 += kAggregationBatch) {
            const std::uint64_t b0 = expand_index(c0, strides);
            for (std::size_t k = 0; k < kAggregationBatch; ++k) {
                const std::uint64_t b = b0 + dk[k];
                const cplx<T> a0 = a[b], a1 = a[b + off1], a2 = a[b + off2],
                              a3 = a[b + off3];
                a[b] = m00 * a0 + m01 * a1 + m02 * a2 + m03 * a3;
                a[b + off1] = m10 * a0 + m11 * a1 + m12 * a2 + m13 * a3;
                a[b + off2] = m20 * a0 + m21 * a1 + m22 * a2 + m23 * a3;
                a[b + off3] = m30 * a0 + m31 * a1 + m32 * a2 + m33 * a3;
            }
        }
    }
}

// ---- permutation / diagonal fast paths ----

template <typename T>
void swap_pairs_range(cplx<T> *a, std::uint64_t base_add, std::uint64_t delta,
                      std::span<const std::uint64_t> strides, std::uint64_t cb,
                      std::uint64_t ce) {
    for (std::uint64_t c = cb; c < ce; ++c) {
        const std::uint64_t i = expand_index(c, strides) + base_add;
        std::swap(a[i], a[i + delta]);
    }
}

template <typename T>
void phase_range(cplx<T> *a, cplx<T> phase, std::uint64_t base_add,
                 std::span<const std::uint64_t> strides, std::uint64_t cb,
                 std::uint64_t ce) {
    for (std::uint64_t c = cb; c < ce; ++c) {
        a[expand_index(c, strides) + base_add] *= phase;
    }
}

} // namespace detail

/// Reference path: straightforward tensor contraction, one coupled group at
/// a time, serial. This is the correctness oracle for the fast path.
template <typename T>
void apply_gate_naive(std::span<cplx<T>> amps, int n, const GateOp<T> &g) {
    detail::check_targets_fit(g.positions, n);
    const std::size_t d = g.dim();
    const auto offsets = detail::group_offsets(g.positions);
    const auto strides = detail::target_strides_sorted(g.positions);
    const std::uint64_t bases = std::uint64_t(1) << (n - g.num_targets());
    detail::apply_dense_range(amps.data(), g.matrix.data(), d, offsets, strides, 0,
                              bases);
}

/// Applies an arbitrary (not necessarily unitary) matrix on the given
/// positions, using the aggregated kernels and the segment plan.
template <typename T>
void apply_matrix(std::span<cplx<T>> amps, int n, std::span<const int> positions,
                  const cvector<T> &matrix, const ThreadConfig &cfg) {
    detail::check_targets_fit(positions, n);
    const std::size_t m = positions.size();
    const std::size_t d = std::size_t(1) << m;
    if (matrix.size() != d * d) {
        throw ShapeError("apply_matrix: matrix does not match position count");
    }
    const auto offsets = detail::group_offsets(positions);
    const std::uint64_t bases = std::uint64_t(1) << (n - m);
    if (bases < kAggregationBatch) {
        const auto strides = detail::target_strides_sorted(positions);
        detail::apply_dense_range(amps.data(), matrix.data(), d, offsets, strides, 0,
                                  bases);
        return;
    }
    const ApplyPlan plan = plan_apply(positions, n, cfg);
    if (m == 1) {
        detail::for_each_segment(plan, [&](const Segment &s, std::size_t) {
            detail::apply_1q_range(amps.data(), matrix.data(), offsets[1], s.begin,
                                   s.end);
        });
    } else if (m == 2) {
        detail::for_each_segment(plan, [&](const Segment &s, std::size_t) {
            detail::apply_2q_range(amps.data(), matrix.data(), offsets[1], offsets[2],
                                   plan.sorted_strides, plan.agg, s.begin, s.end);
        });
    } else {
        detail::for_each_segment(plan, [&](const Segment &s, std::size_t) {
            detail::apply_dense_range(amps.data(), matrix.data(), d, offsets,
                                      plan.sorted_strides, s.begin, s.end);
        });
    }
}

/// Fast path. Identical result to apply_gate_naive; named permutation and
/// diagonal kinds skip the matrix product entirely.
template <typename T>
void apply_gate_fast(std::span<cplx<T>> amps, int n, const GateOp<T> &g,
                     const ThreadConfig &cfg) {
    detail::check_targets_fit(g.positions, n);
    const std::uint64_t bases = std::uint64_t(1) << (n - g.num_targets());
    if (bases < kAggregationBatch) {
        apply_gate_naive(amps, n, g);
        return;
    }
    using C = cplx<T>;
    const auto offsets = detail::group_offsets(g.positions);
    const ApplyPlan plan = plan_apply(g.positions, n, cfg);
    cplx<T> *a = amps.data();
    switch (g.kind) {
    case GateKind::X:
        detail::for_each_segment(plan, [&](const Segment &s, std::size_t) {
            detail::swap_pairs_range(a, std::uint64_t(0), offsets[1],
                                     plan.sorted_strides, s.begin, s.end);
        });
        return;
    case GateKind::Z:
        detail::for_each_segment(plan, [&](const Segment &s, std::size_t) {
            detail::phase_range(a, C(-1), offsets[1], plan.sorted_strides, s.begin,
                                s.end);
        });
        return;
    case GateKind::S:
        detail::for_each_segment(plan, [&](const Segment &s, std::size_t) {
            detail::phase_range(a, C(0, 1), offsets[1], plan.sorted_strides, s.begin,
                                s.end);
        });
        return;
    case GateKind::T:
        detail::for_each_segment(plan, [&](const Segment &s, std::size_t) {
            const T isq = static_cast<T>(std::numbers::sqrt2 / 2);
            detail::phase_range(a, C(isq, isq), offsets[1], plan.sorted_strides,
                                s.begin, s.end);
        });
        return;
    case GateKind::CZ:
        detail::for_each_segment(plan, [&](const Segment &s, std::size_t) {
            detail::phase_range(a, C(-1), offsets[3], plan.sorted_strides, s.begin,
                                s.end);
        });
        return;
    case GateKind::Cnot:
        // Swap the target pair inside the control = 1 half.
        detail::for_each_segment(plan, [&](const Segment &s, std::size_t) {
            detail::swap_pairs_range(a, offsets[1], offsets[2], plan.sorted_strides,
                                     s.begin, s.end);
        });
        return;
    case GateKind::Swap: {
        const std::uint64_t lo = std::min(offsets[1], offsets[2]);
        const std::uint64_t hi = std::max(offsets[1], offsets[2]);
        detail::for_each_segment(plan, [&](const Segment &s, std::size_t) {
            detail::swap_pairs_range(a, lo, hi - lo, plan.sorted_strides, s.begin,
                                     s.end);
        });
        return;
    }
    default:
        break;
    }
    apply_matrix(amps, n, g.positions, g.matrix, cfg);
}

/// rho <- Q rho Q^dag: the gate on the ket positions and its conjugate on
/// the mirrored bra positions of the pseudo state.
template <typename T>
void apply_gate_mixed(MixedState<T> &dm, const GateOp<T> &g,
                      const ThreadConfig &cfg) {
    detail::check_targets_fit(g.positions, dm.num_qubits());
    PureStateView<T> view = dm.as_pure_view();
    apply_gate_fast(view.amplitudes, view.num_qubits, g, cfg);

    GateOp<T> bra;
    bra.positions.reserve(g.positions.size());
    for (int p : g.positions) {
        bra.positions.push_back(p + dm.num_qubits());
    }
    bra.matrix = linalg::conjugated(g.matrix);
    bra.kind = (bra.matrix == g.matrix) ? g.kind : GateKind::Generic;
    apply_gate_fast(view.amplitudes, view.num_qubits, bra, cfg);
}

/// Applies a channel through its dense superoperator, acting as a 2m-qubit
/// gate on the vectorized density matrix.
template <typename T>
void apply_channel(MixedState<T> &dm, const ChannelOp<T> &c,
                   const ThreadConfig &cfg) {
    detail::check_targets_fit(c.positions, dm.num_qubits());
    const Superoperator<T> s = channel_superoperator(c);
    const std::vector<int> positions = s.bound_positions(dm.num_qubits());
    PureStateView<T> view = dm.as_pure_view();
    apply_matrix(view.amplitudes, view.num_qubits, positions, s.matrix, cfg);
}

/// <bra| L |ket> where L acts on the local subspace of `positions`;
/// accumulated per segment in double precision, then summed in segment
/// order so the result does not depend on the thread count.
template <typename T>
cplx<double> bilinear_gate_form(std::span<const cplx<T>> bra,
                                std::span<const cplx<T>> ket, int n,
                                std::span<const int> positions,
                                const cvector<T> &local, const ThreadConfig &cfg) {
    detail::check_targets_fit(positions, n);
    const std::size_t m = positions.size();
    const std::size_t d = std::size_t(1) << m;
    if (local.size() != d * d) {
        throw ShapeError("bilinear_gate_form: matrix does not match positions");
    }
    const auto offsets = detail::group_offsets(positions);
    const ApplyPlan plan = plan_apply(positions, n, cfg);
    std::vector<cplx<double>> partial(plan.segments.size());
    detail::for_each_segment(plan, [&](const Segment &seg, std::size_t si) {
        std::vector<cplx<T>> in(d);
        cplx<double> acc = 0;
        for (std::uint64_t c = seg.begin; c < seg.end; ++c) {
            const std::uint64_t b = detail::expand_index(c, plan.sorted_strides);
            for (std::size_t r = 0; r < d; ++r) {
                in[r] = ket[b + offsets[r]];
            }
            for (std::size_t r = 0; r < d; ++r) {
                cplx<T> w = local[r] * in[0];
                for (std::size_t s = 1; s < d; ++s) {
                    w += local[r + s * d] * in[s];
                }
                acc += std::conj(cplx<double>(bra[b + offsets[r]])) * cplx<double>(w);
            }
        }
        partial[si] = acc;
    });
    cplx<double> total = 0;
    for (const auto &p : partial) {
        total += p;
    }
    return total;
}

namespace detail {

template <typename T>
void reverse_step_1q_range(cplx<T> *fp, cplx<T> *sp, const cplx<T> *iv,
                           std::span<const cvector<T>> dmats, std::uint64_t s,
                           std::uint64_t cb, std::uint64_t ce,
                           std::span<cplx<double>> acc) {
    const cplx<T> i00 = iv[0], i10 = iv[1], i01 = iv[2], i11 = iv[3];
    const std::size_t np = dmats.size();
    if (np == 1 && (ce - cb) % kAggregationBatch == 0) {
        // Hot lane for one-parameter rotations: batch like the forward
        // kernel and keep the inner loop free of cross-iteration
        // dependencies so it vectorizes.
        const cplx<T> *dm = dmats[0].data();
        const cplx<T> d00 = dm[0], d10 = dm[1], d01 = dm[2], d11 = dm[3];
        std::uint64_t dk[kAggregationBatch];
        for (std::size_t k = 0; k < kAggregationBatch; ++k) {
            dk[k] = ((k & ~(s - 1)) << 1) | (k & (s - 1));
        }
        cplx<double> total = 0;
        cplx<T> tmp[kAggregationBatch];
        for (std::uint64_t c0 = cb; c0 < ce; c0 += kAggregationBatch) {
            const std::uint64_t b0 = ((c0 & ~(s - 1)) << 1) | (c0 & (s - 1));
            for (std::size_t k = 0; k < kAggregationBatch; ++k) {
                const std::uint64_t i = b0 + dk[k];
                const cplx<T> f0 = fp[i], f1 = fp[i + s];
                const cplx<T> w0 = i00 * f0 + i01 * f1;
                const cplx<T> w1 = i10 * f0 + i11 * f1;
                fp[i] = w0;
                fp[i + s] = w1;
                const cplx<T> g0 = sp[i], g1 = sp[i + s];
                tmp[k] = std::conj(g0) * (d00 * w0 + d01 * w1) +
                         std::conj(g1) * (d10 * w0 + d11 * w1);
                sp[i] = i00 * g0 + i01 * g1;
                sp[i + s] = i10 * g0 + i11 * g1;
            }
            for (std::size_t k = 0; k < kAggregationBatch; ++k) {
                total += cplx<double>(tmp[k]);
            }
        }
        acc[0] += total;
        return;
    }
    for (std::uint64_t c = cb; c < ce; ++c) {
        const std::uint64_t b = ((c & ~(s - 1)) << 1) | (c & (s - 1));
        const cplx<T> f0 = fp[b], f1 = fp[b + s];
        const cplx<T> w0 = i00 * f0 + i01 * f1;
        const cplx<T> w1 = i10 * f0 + i11 * f1;
        fp[b] = w0;
        fp[b + s] = w1;
        const cplx<T> g0 = sp[b], g1 = sp[b + s];
        for (std::size_t p = 0; p < np; ++p) {
            const cplx<T> *dm = dmats[p].data();
            const cplx<T> v = std::conj(g0) * (dm[0] * w0 + dm[2] * w1) +
                              std::conj(g1) * (dm[1] * w0 + dm[3] * w1);
            acc[p] += cplx<double>(v);
        }
        sp[b] = i00 * g0 + i01 * g1;
        sp[b + s] = i10 * g0 + i11 * g1;
    }
}

template <typename T>
void reverse_step_2q_range(cplx<T> *fp, cplx<T> *sp, const cplx<T> *iv,
                           std::span<const cvector<T>> dmats, std::uint64_t off1,
                           std::uint64_t off2,
                           std::span<const std::uint64_t> strides,
                           std::uint64_t cb, std::uint64_t ce,
                           std::span<cplx<double>> acc) {
    const std::uint64_t off3 = off1 + off2;
    const std::size_t np = dmats.size();
    for (std::uint64_t c = cb; c < ce; ++c) {
        const std::uint64_t b = expand_index(c, strides);
        const cplx<T> f0 = fp[b], f1 = fp[b + off1], f2 = fp[b + off2],
                      f3 = fp[b + off3];
        cplx<T> w[4];
        for (int r = 0; r < 4; ++r) {
            w[r] = iv[r] * f0 + iv[r + 4] * f1 + iv[r + 8] * f2 + iv[r + 12] * f3;
        }
        fp[b] = w[0];
        fp[b + off1] = w[1];
        fp[b + off2] = w[2];
        fp[b + off3] = w[3];
        const cplx<T> g0 = sp[b], g1 = sp[b + off1], g2 = sp[b + off2],
                      g3 = sp[b + off3];
        for (std::size_t p = 0; p < np; ++p) {
            const cplx<T> *dm = dmats[p].data();
            cplx<T> v = std::conj(g0) * (dm[0] * w[0] + dm[4] * w[1] +
                                         dm[8] * w[2] + dm[12] * w[3]);
            v += std::conj(g1) * (dm[1] * w[0] + dm[5] * w[1] + dm[9] * w[2] +
                                  dm[13] * w[3]);
            v += std::conj(g2) * (dm[2] * w[0] + dm[6] * w[1] + dm[10] * w[2] +
                                  dm[14] * w[3]);
            v += std::conj(g3) * (dm[3] * w[0] + dm[7] * w[1] + dm[11] * w[2] +
                                  dm[15] * w[3]);
            acc[p] += cplx<double>(v);
        }
        sp[b] = iv[0] * g0 + iv[4] * g1 + iv[8] * g2 + iv[12] * g3;
        sp[b + off1] = iv[1] * g0 + iv[5] * g1 + iv[9] * g2 + iv[13] * g3;
        sp[b + off2] = iv[2] * g0 + iv[6] * g1 + iv[10] * g2 + iv[14] * g3;
        sp[b + off3] = iv[3] * g0 + iv[7] * g1 + iv[11] * g2 + iv[15] * g3;
    }
}

template <typename T>
void reverse_step_dense_range(cplx<T> *fp, cplx<T> *sp, const cplx<T> *iv,
                              std::span<const cvector<T>> dmats, std::size_t d,
                              std::span<const std::uint64_t> offsets,
                              std::span<const std::uint64_t> strides,
                              std::uint64_t cb, std::uint64_t ce,
                              std::span<cplx<double>> acc) {
    const std::size_t np = dmats.size();
    std::vector<cplx<T>> f(d), g(d), w(d);
    for (std::uint64_t c = cb; c < ce; ++c) {
        const std::uint64_t b = expand_index(c, strides);
        for (std::size_t r = 0; r < d; ++r) {
            f[r] = fp[b + offsets[r]];
            g[r] = sp[b + offsets[r]];
        }
        for (std::size_t r = 0; r < d; ++r) {
            cplx<T> v = iv[r] * f[0];
            for (std::size_t s = 1; s < d; ++s) {
                v += iv[r + s * d] * f[s];
            }
            w[r] = v;
            fp[b + offsets[r]] = v;
        }
        for (std::size_t p = 0; p < np; ++p) {
            const cplx<T> *dm = dmats[p].data();
            cplx<double> a = 0;
            for (std::size_t r = 0; r < d; ++r) {
                cplx<T> v = dm[r] * w[0];
                for (std::size_t s = 1; s < d; ++s) {
                    v += dm[r + s * d] * w[s];
                }
                a += std::conj(cplx<double>(g[r])) * cplx<double>(v);
            }
            acc[p] += a;
        }
        for (std::size_t r = 0; r < d; ++r) {
            cplx<T> v = iv[r] * g[0];
            for (std::size_t s = 1; s < d; ++s) {
                v += iv[r + s * d] * g[s];
            }
            sp[b + offsets[r]] = v;
        }
    }
}

} // namespace detail

/// One fused reverse-sweep step over two states:
///   phi <- inv * phi;   acc[p] = <psi| dmats[p] |phi>;   psi <- inv * psi.
/// Touches each coupled amplitude group of both states exactly once.
template <typename T>
std::vector<cplx<double>>
reverse_sweep_step(std::span<cplx<T>> phi, std::span<cplx<T>> psi, int n,
                   std::span<const int> positions, const cvector<T> &inv,
                   std::span<const cvector<T>> dmats, const ThreadConfig &cfg) {
    detail::check_targets_fit(positions, n);
    const std::size_t m = positions.size();
    const std::size_t d = std::size_t(1) << m;
    const std::size_t np = dmats.size();
    const auto offsets = detail::group_offsets(positions);
    const ApplyPlan plan = plan_apply(positions, n, cfg);
    std::vector<std::vector<cplx<double>>> partial(plan.segments.size(),
                                                   std::vector<cplx<double>>(np));
    cplx<T> *fp = phi.data();
    cplx<T> *sp = psi.data();
    const cplx<T> *iv = inv.data();
    detail::for_each_segment(plan, [&](const Segment &seg, std::size_t si) {
        auto acc = std::span<cplx<double>>(partial[si]);
        if (m == 1) {
            detail::reverse_step_1q_range(fp, sp, iv, dmats, offsets[1], seg.begin,
                                          seg.end, acc);
        } else if (m == 2) {
            detail::reverse_step_2q_range(fp, sp, iv, dmats, offsets[1],
                                          offsets[2], plan.sorted_strides,
                                          seg.begin, seg.end, acc);
        } else {
            detail::reverse_step_dense_range(fp, sp, iv, dmats, d, offsets,
                                             plan.sorted_strides, seg.begin,
                                             seg.end, acc);
        }
    });
    std::vector<cplx<double>> total(np);
    for (const auto &seg : partial) {
        for (std::size_t p = 0; p < np; ++p) {
            total[p] += seg[p];
        }
    }
    return total;
}

} // namespace vqcs
