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

// Dense helpers for the small (<= 64x64) matrices that describe gates,
// Kraus operators and channel superoperators. Matrices are stored as flat
// column-major vectors: element (r, c) lives at index r + c*d.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "vqcs/types.hpp"

namespace vqcs::linalg {

template <typename T> cvector<T> identity(std::size_t d) {
    cvector<T> m(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        m[i + i * d] = T(1);
    }
    return m;
}

/// C = A * B, both d x d.
template <typename T>
cvector<T> matmul(const cvector<T> &a, const cvector<T> &b, std::size_t d) {
    cvector<T> c(d * d);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
            const cplx<T> bkj = b[k + j * d];
            if (bkj == cplx<T>(0)) {
                continue;
            }
            for (std::size_t i = 0; i < d; ++i) {
                c[i + j * d] += a[i + k * d] * bkj;
            }
        }
    }
    return c;
}

template <typename T> cvector<T> adjoint(const cvector<T> &a, std::size_t d) {
    cvector<T> r(d * d);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < d; ++i) {
            r[j + i * d] = std::conj(a[i + j * d]);
        }
    }
    return r;
}

template <typename T> cvector<T> conjugated(const cvector<T> &a) {
    cvector<T> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i] = std::conj(a[i]);
    }
    return r;
}

/// Kronecker product where `low` indexes the fast (low) bits of the result
/// and `high` the slow (high) bits: R[(rh,rl),(ch,cl)] = high[rh,ch]*low[rl,cl].
template <typename T>
cvector<T> kron(const cvector<T> &high, std::size_t dh, const cvector<T> &low,
                std::size_t dl) {
    const std::size_t d = dh * dl;
    cvector<T> r(d * d);
    for (std::size_t ch = 0; ch < dh; ++ch) {
        for (std::size_t cl = 0; cl < dl; ++cl) {
            for (std::size_t rh = 0; rh < dh; ++rh) {
                for (std::size_t rl = 0; rl < dl; ++rl) {
                    r[(rl + rh * dl) + (cl + ch * dl) * d] =
                        high[rh + ch * dh] * low[rl + cl * dl];
                }
            }
        }
    }
    return r;
}

template <typename T> double max_abs(const cvector<T> &a) {
    double m = 0;
    for (const auto &x : a) {
        m = std::max(m, static_cast<double>(std::abs(x)));
    }
    return m;
}

/// max |(A^dag A - I)_{ij}|; zero for exactly unitary A.
template <typename T> double unitarity_defect(const cvector<T> &a, std::size_t d) {
    double m = 0;
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < d; ++i) {
            cplx<double> s = 0;
            for (std::size_t k = 0; k < d; ++k) {
                s += std::conj(cplx<double>(a[k + i * d])) * cplx<double>(a[k + j * d]);
            }
            if (i == j) {
                s -= 1.0;
            }
            m = std::max(m, std::abs(s));
        }
    }
    return m;
}

template <typename T> double norm1(const cvector<T> &a, std::size_t d) {
    double best = 0;
    for (std::size_t j = 0; j < d; ++j) {
        double col = 0;
        for (std::size_t i = 0; i < d; ++i) {
            col += std::abs(a[i + j * d]);
        }
        best = std::max(best, col);
    }
    return best;
}

template <typename T> struct InverseResult {
    cvector<T> inverse;
    double condition; // one-norm condition estimate
    bool singular;
};

/// Dense inverse by LU factorization with partial pivoting.
template <typename T> InverseResult<T> lu_inverse(const cvector<T> &a, std::size_t d) {
    cvector<T> lu = a;
    std::vector<std::size_t> piv(d);
    for (std::size_t i = 0; i < d; ++i) {
        piv[i] = i;
    }
    const double scale = std::max(max_abs(a), 1e-300);
    for (std::size_t k = 0; k < d; ++k) {
        std::size_t p = k;
        double best = std::abs(lu[k + k * d]);
        for (std::size_t i = k + 1; i < d; ++i) {
            const double v = std::abs(lu[i + k * d]);
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best <= scale * 1e-300) {
            return {{}, std::numeric_limits<double>::infinity(), true};
        }
        if (p != k) {
            std::swap(piv[p], piv[k]);
            for (std::size_t j = 0; j < d; ++j) {
                std::swap(lu[p + j * d], lu[k + j * d]);
            }
        }
        const cplx<T> pivot = lu[k + k * d];
        for (std::size_t i = k + 1; i < d; ++i) {
            const cplx<T> f = lu[i + k * d] / pivot;
            lu[i + k * d] = f;
            for (std::size_t j = k + 1; j < d; ++j) {
                lu[i + j * d] -= f * lu[k + j * d];
            }
        }
    }

    // Solve A X = I column by column.
    cvector<T> inv(d * d);
    std::vector<cplx<T>> x(d);
    for (std::size_t col = 0; col < d; ++col) {
        for (std::size_t i = 0; i < d; ++i) {
            x[i] = (piv[i] == col) ? cplx<T>(1) : cplx<T>(0);
        }
        for (std::size_t i = 1; i < d; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                x[i] -= lu[i + j * d] * x[j];
            }
        }
        for (std::size_t ii = d; ii-- > 0;) {
            for (std::size_t j = ii + 1; j < d; ++j) {
                x[ii] -= lu[ii + j * d] * x[j];
            }
            x[ii] /= lu[ii + ii * d];
        }
        for (std::size_t i = 0; i < d; ++i) {
            inv[i + col * d] = x[i];
        }
    }
    const double cond = norm1(a, d) * norm1(inv, d);
    return {std::move(inv), cond, false};
}

} // namespace vqcs::linalg
