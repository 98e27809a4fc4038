#include "gbs/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>

namespace gbs {

namespace {

void require_square(const Mat& a, const char* who) {
    if (a.rows() != a.cols()) throw std::invalid_argument(std::string(who) + ": matrix not square");
}

// ---------------------------------------------------------------------
// Enumeration oracles
// ---------------------------------------------------------------------

cplx haf_enum_rec(const Mat& a, std::vector<std::size_t>& idx) {
    if (idx.empty()) return 1.0;
    std::size_t i0 = idx[0];
    cplx total = 0.0;
    std::vector<std::size_t> rest(idx.size() - 2);
    for (std::size_t j = 1; j < idx.size(); ++j) {
        std::size_t r = 0;
        for (std::size_t t = 1; t < idx.size(); ++t)
            if (t != j) rest[r++] = idx[t];
        total += a(i0, idx[j]) * haf_enum_rec(a, rest);
    }
    return total;
}

cplx loop_haf_enum_rec(const Mat& a, std::vector<std::size_t>& idx) {
    if (idx.empty()) return 1.0;
    std::size_t i0 = idx[0];
    // self-loop branch
    std::vector<std::size_t> tail(idx.begin() + 1, idx.end());
    cplx total = a(i0, i0) * loop_haf_enum_rec(a, tail);
    std::vector<std::size_t> rest(idx.size() >= 2 ? idx.size() - 2 : 0);
    for (std::size_t j = 1; j < idx.size(); ++j) {
        std::size_t r = 0;
        for (std::size_t t = 1; t < idx.size(); ++t)
            if (t != j) rest[r++] = idx[t];
        total += a(i0, idx[j]) * loop_haf_enum_rec(a, rest);
    }
    return total;
}

// ---------------------------------------------------------------------
// Power-trace machinery
// ---------------------------------------------------------------------

// Reduce a row-major d x d buffer to upper Hessenberg form in place.
void hessenberg_inplace(cplx* h, std::size_t d, std::vector<cplx>& v) {
    if (d < 3) return;
    v.resize(d);
    for (std::size_t k = 0; k + 2 < d; ++k) {
        double norm2 = 0.0;
        for (std::size_t i = k + 1; i < d; ++i) norm2 += std::norm(h[i * d + k]);
        double norm = std::sqrt(norm2);
        if (norm <= 1e-300) continue;
        cplx x0 = h[(k + 1) * d + k];
        cplx phase = (std::abs(x0) > 0.0) ? x0 / std::abs(x0) : cplx(1.0, 0.0);
        cplx alpha = -phase * norm;
        // v = x - alpha*e1, normalized
        double vnorm2 = 0.0;
        v[k + 1] = x0 - alpha;
        vnorm2 += std::norm(v[k + 1]);
        for (std::size_t i = k + 2; i < d; ++i) {
            v[i] = h[i * d + k];
            vnorm2 += std::norm(v[i]);
        }
        if (vnorm2 <= 1e-300) continue;
        double inv_vnorm = 1.0 / std::sqrt(vnorm2);
        for (std::size_t i = k + 1; i < d; ++i) v[i] *= inv_vnorm;

        // rows: H <- (I - 2 v v^H) H
        for (std::size_t j = k; j < d; ++j) {
            cplx s = 0.0;
            for (std::size_t i = k + 1; i < d; ++i) s += std::conj(v[i]) * h[i * d + j];
            s *= 2.0;
            for (std::size_t i = k + 1; i < d; ++i) h[i * d + j] -= s * v[i];
        }
        // columns: H <- H (I - 2 v v^H)
        for (std::size_t i = 0; i < d; ++i) {
            cplx s = 0.0;
            for (std::size_t j = k + 1; j < d; ++j) s += h[i * d + j] * v[j];
            s *= 2.0;
            for (std::size_t j = k + 1; j < d; ++j) h[i * d + j] -= s * std::conj(v[j]);
        }
        h[(k + 1) * d + k] = alpha;
        for (std::size_t i = k + 2; i < d; ++i) h[i * d + k] = 0.0;
    }
}

// Characteristic polynomial of an upper Hessenberg matrix by the
// La Budde recurrence over leading principal submatrices. Coefficients
// ascending in lambda; result has degree d (monic).
void labudde_charpoly(const cplx* h, std::size_t d, std::vector<std::vector<cplx>>& c) {
    c.resize(d + 1);
    c[0].assign(1, cplx(1.0, 0.0));
    for (std::size_t m = 1; m <= d; ++m) {
        auto& cm = c[m];
        cm.assign(m + 1, cplx(0.0, 0.0));
        const auto& prev = c[m - 1];
        cplx hmm = h[(m - 1) * d + (m - 1)];
        for (std::size_t t = 0; t < prev.size(); ++t) {
            cm[t + 1] += prev[t];
            cm[t] -= hmm * prev[t];
        }
        cplx beta = 1.0;
        for (std::size_t i = m - 1; i >= 1; --i) {
            beta *= h[i * d + (i - 1)];
            cplx coef = h[(i - 1) * d + (m - 1)] * beta;
            const auto& ci = c[i - 1];
            for (std::size_t t = 0; t < ci.size(); ++t) cm[t] -= coef * ci[t];
        }
    }
}

// Newton's identities: power sums s_1..s_count of the roots of a monic
// polynomial with ascending coefficients c (degree d).
void newton_power_sums(const std::vector<cplx>& c, std::size_t d, std::size_t count,
                       std::vector<cplx>& s) {
    s.assign(count + 1, cplx(0.0, 0.0));
    // a_k = coefficient of lambda^(d-k)
    for (std::size_t k = 1; k <= count; ++k) {
        cplx acc = 0.0;
        std::size_t top = std::min(k - 1, d);
        for (std::size_t i = 1; i <= top; ++i) acc += c[d - i] * s[k - i];
        if (k <= d)
            s[k] = -static_cast<double>(k) * c[d - k] - acc;
        else
            s[k] = -acc;
    }
}

struct SubsetWorkspace {
    std::vector<cplx> b;       // gathered pair-swapped submatrix
    std::vector<cplx> house;   // Householder scratch
    std::vector<cplx> cvec;    // diagonal row vector
    std::vector<cplx> dvec;    // swapped diagonal column
    std::vector<cplx> wvec;    // iterated B^j * dvec
    std::vector<cplx> traces;  // power sums
    std::vector<cplx> p;       // generating-function coefficients
    std::vector<cplx> e;       // exp-series coefficients
    std::vector<std::vector<cplx>> charpoly;
    std::vector<std::size_t> verts;
};

// Contribution of one pair subset to the hafnian / loop hafnian sum.
cplx subset_term(const Mat& a, const std::vector<cplx>* gamma, std::size_t n, std::uint64_t mask,
                 SubsetWorkspace& ws) {
    std::size_t pairs = static_cast<std::size_t>(std::popcount(mask));
    int sign = ((n - pairs) & 1) ? -1 : 1;
    if (pairs == 0) return 0.0;  // exp-series has no degree-n term for n >= 1

    std::size_t d = 2 * pairs;
    ws.verts.clear();
    for (std::size_t t = 0; t < n; ++t)
        if (mask & (std::uint64_t(1) << t)) {
            ws.verts.push_back(2 * t);
            ws.verts.push_back(2 * t + 1);
        }

    // B = X_Z A_Z: row r of B is row (r XOR 1) of the gathered submatrix.
    ws.b.resize(d * d);
    for (std::size_t r = 0; r < d; ++r) {
        std::size_t src = ws.verts[r ^ 1];
        for (std::size_t c = 0; c < d; ++c) ws.b[r * d + c] = a(src, ws.verts[c]);
    }

    bool loops = gamma != nullptr;
    if (loops) {
        ws.cvec.resize(d);
        ws.dvec.resize(d);
        for (std::size_t r = 0; r < d; ++r) {
            ws.cvec[r] = (*gamma)[ws.verts[r]];
            ws.dvec[r] = (*gamma)[ws.verts[r ^ 1]];
        }
    }

    ws.p.assign(n + 1, cplx(0.0, 0.0));
    if (loops) {
        // 0.5 * C B^(j-1) D accumulated before Hessenberg clobbers B
        ws.wvec = ws.dvec;
        for (std::size_t j = 1; j <= n; ++j) {
            cplx dot = 0.0;
            for (std::size_t r = 0; r < d; ++r) dot += ws.cvec[r] * ws.wvec[r];
            ws.p[j] += 0.5 * dot;
            if (j == n) break;
            ws.traces.assign(d, cplx(0.0, 0.0));  // reuse as temp vector
            for (std::size_t r = 0; r < d; ++r) {
                cplx s = 0.0;
                const cplx* row = &ws.b[r * d];
                for (std::size_t c = 0; c < d; ++c) s += row[c] * ws.wvec[c];
                ws.traces[r] = s;
            }
            std::swap(ws.wvec, ws.traces);
        }
    }

    hessenberg_inplace(ws.b.data(), d, ws.house);
    labudde_charpoly(ws.b.data(), d, ws.charpoly);
    newton_power_sums(ws.charpoly[d], d, n, ws.traces);
    for (std::size_t j = 1; j <= n; ++j)
        ws.p[j] += ws.traces[j] / (2.0 * static_cast<double>(j));

    // coefficient of eta^n in exp(sum_j p_j eta^j)
    ws.e.assign(n + 1, cplx(0.0, 0.0));
    ws.e[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        cplx acc = 0.0;
        for (std::size_t j = 1; j <= k; ++j) acc += static_cast<double>(j) * ws.p[j] * ws.e[k - j];
        ws.e[k] = acc / static_cast<double>(k);
    }
    return static_cast<double>(sign) * ws.e[n];
}

// Shared subset loop. Chunk boundaries and the chunk-sum order are fixed
// by the problem size alone, so serial and parallel runs agree bitwise.
cplx lhaf_core(const Mat& a, const std::vector<cplx>* gamma, bool parallel) {
    std::size_t dim = a.rows();
    std::size_t n = dim / 2;
    if (n == 0) return 1.0;
    if (gamma == nullptr) {
        bool all_zero = true;
        for (std::size_t i = 0; i < dim && all_zero; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                if (a(i, j) != cplx(0.0, 0.0)) {
                    all_zero = false;
                    break;
                }
        if (all_zero) return 0.0;  // no matching carries weight
    }
    if (gamma != nullptr) {
        bool diag_only = true;
        for (std::size_t i = 0; i < dim && diag_only; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                if (i != j && a(i, j) != cplx(0.0, 0.0)) {
                    diag_only = false;
                    break;
                }
        if (diag_only) {
            // Every matching is all loops.
            cplx prod = 1.0;
            for (std::size_t i = 0; i < dim; ++i) prod *= (*gamma)[i];
            return prod;
        }
    }

    std::uint64_t total_masks = std::uint64_t(1) << n;
    std::size_t chunk_count = static_cast<std::size_t>(std::min<std::uint64_t>(total_masks, 2048));
    std::uint64_t chunk_len = total_masks / chunk_count;
    std::vector<cplx> chunk_sums(chunk_count, cplx(0.0, 0.0));

    // Small subset spaces run serially: the region overhead would dominate.
    // The chunked arithmetic is identical either way.
    bool go_parallel = parallel && n >= 10 && !omp_in_parallel();
#pragma omp parallel if (go_parallel)
    {
        SubsetWorkspace ws;
#pragma omp for schedule(dynamic)
        for (long long c = 0; c < static_cast<long long>(chunk_count); ++c) {
            cplx sum = 0.0;
            std::uint64_t lo = static_cast<std::uint64_t>(c) * chunk_len;
            std::uint64_t hi = lo + chunk_len;
            for (std::uint64_t mask = lo; mask < hi; ++mask)
                sum += subset_term(a, gamma, n, mask, ws);
            chunk_sums[static_cast<std::size_t>(c)] = sum;
        }
    }

    cplx total = 0.0;
    for (const cplx& s : chunk_sums) total += s;
    return total;
}

cplx haf_dispatch(const Mat& a, bool parallel) {
    require_square(a, "haf_fast");
    if (a.rows() % 2 != 0) throw std::invalid_argument("haf_fast: dimension must be even");
    if (a.rows() == 0) return 1.0;
    // The hafnian ignores the diagonal; zero it so the subset generating
    // functions see exactly the matching weights.
    Mat z = a;
    for (std::size_t i = 0; i < z.rows(); ++i) z(i, i) = 0.0;
    return lhaf_core(z, nullptr, parallel);
}

cplx loop_haf_dispatch(const Mat& a, bool parallel) {
    require_square(a, "loop_haf");
    if (!a.is_symmetric(1e-8)) throw std::invalid_argument("loop_haf: matrix must be symmetric");
    std::size_t dim = a.rows();
    if (dim == 0) return 1.0;
    if (dim % 2 != 0) {
        // Pad with an isolated vertex carrying a unit loop; it is forced
        // to take the loop in every matching.
        Mat p(dim + 1, dim + 1);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) p(i, j) = a(i, j);
        p(dim, dim) = 1.0;
        return loop_haf_dispatch(p, parallel);
    }
    std::vector<cplx> gamma(dim);
    for (std::size_t i = 0; i < dim; ++i) gamma[i] = a(i, i);
    return lhaf_core(a, &gamma, parallel);
}

// ---------------------------------------------------------------------
// Torontonian
// ---------------------------------------------------------------------

cplx torontonian_dispatch(const Mat& o, const std::vector<int>& clicks, bool parallel) {
    require_square(o, "torontonian");
    if (o.rows() != 2 * clicks.size())
        throw std::invalid_argument("torontonian: matrix is not 2k x 2k for the pattern");
    std::size_t k = clicks.size();
    std::vector<std::size_t> detected;
    for (std::size_t i = 0; i < k; ++i) {
        if (clicks[i] != 0 && clicks[i] != 1)
            throw std::invalid_argument("torontonian: pattern must be binary");
        if (clicks[i] == 1) detected.push_back(i);
    }
    std::size_t d = detected.size();

    std::uint64_t total_masks = std::uint64_t(1) << d;
    std::size_t chunk_count = static_cast<std::size_t>(std::min<std::uint64_t>(total_masks, 2048));
    std::uint64_t chunk_len = total_masks / chunk_count;
    std::vector<cplx> chunk_sums(chunk_count, cplx(0.0, 0.0));
    bool bad_det = false;

    bool go_parallel = parallel && d >= 10 && !omp_in_parallel();
#pragma omp parallel if (go_parallel)
    {
        std::vector<std::size_t> idx;
#pragma omp for schedule(dynamic)
        for (long long c = 0; c < static_cast<long long>(chunk_count); ++c) {
            cplx sum = 0.0;
            std::uint64_t lo = static_cast<std::uint64_t>(c) * chunk_len;
            std::uint64_t hi = lo + chunk_len;
            for (std::uint64_t mask = lo; mask < hi; ++mask) {
                std::size_t z = static_cast<std::size_t>(std::popcount(mask));
                idx.clear();
                for (std::size_t t = 0; t < d; ++t)
                    if (mask & (std::uint64_t(1) << t)) idx.push_back(detected[t]);
                for (std::size_t t = 0; t < d; ++t)
                    if (mask & (std::uint64_t(1) << t)) idx.push_back(detected[t] + k);
                std::size_t dz = idx.size();
                Mat mm(dz, dz);
                for (std::size_t i = 0; i < dz; ++i) {
                    for (std::size_t j = 0; j < dz; ++j) mm(i, j) = -o(idx[i], idx[j]);
                    mm(i, i) += 1.0;
                }
                cplx det = lu_det(mm);
                if (det.real() <= 0.0 || std::abs(det) < 1e-12) {
#pragma omp atomic write
                    bad_det = true;
                    continue;
                }
                int sign = ((d - z) & 1) ? -1 : 1;
                sum += static_cast<double>(sign) / std::sqrt(det);
            }
            chunk_sums[static_cast<std::size_t>(c)] = sum;
        }
    }
    if (bad_det)
        throw std::domain_error("torontonian: subset determinant not positive (invalid state)");

    cplx total = 0.0;
    for (const cplx& s : chunk_sums) total += s;
    return total;
}

// ---------------------------------------------------------------------
// Barvinok estimator
// ---------------------------------------------------------------------

double real_lu_det(std::vector<double>& m, std::size_t n) {
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(m[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double v = std::abs(m[r * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m[piv * n + j], m[col * n + j]);
            det = -det;
        }
        double d = m[col * n + col];
        det *= d;
        double inv_d = 1.0 / d;
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = m[r * n + col] * inv_d;
            m[r * n + col] = f;
            if (f == 0.0) continue;
            for (std::size_t j = col + 1; j < n; ++j) m[r * n + j] -= f * m[col * n + j];
        }
    }
    return det;
}

BarvinokEstimate barvinok_dispatch(const Mat& a, std::int64_t m_samples, Rng& rng, bool parallel) {
    require_square(a, "haf_barvinok");
    std::size_t dim = a.rows();
    if (dim % 2 != 0) throw std::invalid_argument("haf_barvinok: dimension must be even");
    if (m_samples < 1) throw std::invalid_argument("haf_barvinok: sample count must be >= 1");
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            if (a(i, j).real() < -1e-12 || std::abs(a(i, j).imag()) > 1e-12)
                throw std::domain_error("haf_barvinok: matrix entries must be non-negative");
        }
    if (dim == 0) return {1.0, 0.0};

    std::vector<double> sq(dim * dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            sq[i * dim + j] = std::sqrt(std::max(0.0, a(i, j).real()));

    // One value off the caller's stream seeds all draw chunks.
    std::uint64_t base = rng.next_u64();
    constexpr std::int64_t kChunk = 64;
    std::int64_t chunk_count = (m_samples + kChunk - 1) / kChunk;
    std::vector<double> chunk_sum(chunk_count, 0.0), chunk_sumsq(chunk_count, 0.0);

    bool go_parallel = parallel && m_samples >= 512 && !omp_in_parallel();
#pragma omp parallel if (go_parallel)
    {
        std::vector<double> w(dim * dim);
#pragma omp for schedule(dynamic)
        for (long long c = 0; c < chunk_count; ++c) {
            Rng sub(Rng::mix(base, static_cast<std::uint64_t>(c)));
            std::int64_t lo = c * kChunk;
            std::int64_t hi = std::min(m_samples, lo + kChunk);
            double s = 0.0, s2 = 0.0;
            for (std::int64_t t = lo; t < hi; ++t) {
                for (std::size_t i = 0; i < dim; ++i) {
                    w[i * dim + i] = 0.0;
                    for (std::size_t j = i + 1; j < dim; ++j) {
                        double g = sub.normal();
                        w[i * dim + j] = g * sq[i * dim + j];
                        w[j * dim + i] = -w[i * dim + j];
                    }
                }
                double det = real_lu_det(w, dim);
                s += det;
                s2 += det * det;
            }
            chunk_sum[static_cast<std::size_t>(c)] = s;
            chunk_sumsq[static_cast<std::size_t>(c)] = s2;
        }
    }

    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t c = 0; c < chunk_count; ++c) {
        sum += chunk_sum[static_cast<std::size_t>(c)];
        sumsq += chunk_sumsq[static_cast<std::size_t>(c)];
    }
    double mean = sum / static_cast<double>(m_samples);
    double se = 0.0;
    if (m_samples > 1) {
        double var = (sumsq - static_cast<double>(m_samples) * mean * mean) /
                     static_cast<double>(m_samples - 1);
        se = std::sqrt(std::max(0.0, var) / static_cast<double>(m_samples));
    }
    return {mean, se};
}

}  // namespace

cplx haf_enum(const Mat& a, std::size_t cap) {
    require_square(a, "haf_enum");
    if (a.rows() % 2 != 0) throw std::invalid_argument("haf_enum: dimension must be even");
    if (a.rows() > cap) throw std::invalid_argument("haf_enum: dimension above enumeration cap");
    std::vector<std::size_t> idx(a.rows());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return haf_enum_rec(a, idx);
}

cplx loop_haf_enum(const Mat& a, std::size_t cap) {
    require_square(a, "loop_haf_enum");
    if (a.rows() > cap) throw std::invalid_argument("loop_haf_enum: dimension above enumeration cap");
    std::vector<std::size_t> idx(a.rows());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return loop_haf_enum_rec(a, idx);
}

cplx haf_fast(const Mat& a) { return haf_dispatch(a, true); }
cplx haf_fast_serial(const Mat& a) { return haf_dispatch(a, false); }

cplx loop_haf(const Mat& a) { return loop_haf_dispatch(a, true); }
cplx loop_haf_serial(const Mat& a) { return loop_haf_dispatch(a, false); }

cplx torontonian(const Mat& o, const std::vector<int>& clicks) {
    return torontonian_dispatch(o, clicks, true);
}
cplx torontonian_serial(const Mat& o, const std::vector<int>& clicks) {
    return torontonian_dispatch(o, clicks, false);
}

BarvinokEstimate haf_barvinok(const Mat& a, std::int64_t m_samples, Rng& rng) {
    return barvinok_dispatch(a, m_samples, rng, true);
}
BarvinokEstimate haf_barvinok_serial(const Mat& a, std::int64_t m_samples, Rng& rng) {
    return barvinok_dispatch(a, m_samples, rng, false);
}

namespace detail {
std::vector<cplx> power_traces(const Mat& b, std::size_t count) {
    require_square(b, "power_traces");
    std::size_t d = b.rows();
    std::vector<cplx> h(b.data(), b.data() + d * d);
    std::vector<cplx> scratch;
    hessenberg_inplace(h.data(), d, scratch);
    std::vector<std::vector<cplx>> c;
    labudde_charpoly(h.data(), d, c);
    std::vector<cplx> s;
    newton_power_sums(c[d], d, count, s);
    return std::vector<cplx>(s.begin() + 1, s.end());
}
}  // namespace detail

}  // namespace gbs
