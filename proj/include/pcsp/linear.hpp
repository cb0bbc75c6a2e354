#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "pcsp/common.hpp"
#include "pcsp/rational.hpp"

namespace pcsp {

/// Exact integer equality system. Variables flagged nonnegative participate in
/// LP-mode solving; integer-mode solving ignores the flags (unrestricted sign).
struct LinearSystem {
    std::vector<std::string> var_names;
    std::vector<char> nonneg;
    std::vector<std::vector<Int>> rows;
    std::vector<Int> rhs;
    bool trivially_infeasible = false;

    int num_vars() const { return static_cast<int>(var_names.size()); }

    int add_var(std::string name, bool nonnegative) {
        var_names.push_back(std::move(name));
        nonneg.push_back(nonnegative ? 1 : 0);
        return num_vars() - 1;
    }

    void add_row(std::vector<Int> coeffs, Int b) {
        if (static_cast<int>(coeffs.size()) != num_vars())
            throw Error("linear system: row width does not match variable count");
        rows.push_back(std::move(coeffs));
        rhs.push_back(std::move(b));
    }

    bool check_point(const std::vector<Rat>& x) const {
        if (static_cast<int>(x.size()) != num_vars()) return false;
        for (int v = 0; v < num_vars(); ++v)
            if (nonneg[static_cast<std::size_t>(v)] && x[static_cast<std::size_t>(v)] < 0)
                return false;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            Rat acc = 0;
            for (int v = 0; v < num_vars(); ++v)
                acc += Rat(rows[r][static_cast<std::size_t>(v)]) * x[static_cast<std::size_t>(v)];
            if (acc != Rat(rhs[r])) return false;
        }
        return true;
    }

    bool check_integer_point(const std::vector<Int>& x) const {
        if (static_cast<int>(x.size()) != num_vars()) return false;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            Int acc = 0;
            for (int v = 0; v < num_vars(); ++v)
                acc += rows[r][static_cast<std::size_t>(v)] * x[static_cast<std::size_t>(v)];
            if (acc != rhs[r]) return false;
        }
        return true;
    }
};

enum class LpStatus { Infeasible, Optimal, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<Rat> point; // per system variable; on Unbounded, a feasible ray point
    Rat value = 0;
};

namespace detail {

// Dense exact simplex, Bland's rule throughout. Free variables are split into
// positive and negative parts so the tableau is in standard form.
class Simplex {
  public:
    explicit Simplex(const LinearSystem& sys) : sys_(sys) {
        for (int v = 0; v < sys.num_vars(); ++v) {
            col_var_.push_back({v, 1});
            if (!sys.nonneg[static_cast<std::size_t>(v)]) col_var_.push_back({v, -1});
        }
        ncols_ = static_cast<int>(col_var_.size());
        m_ = static_cast<int>(sys.rows.size());
        tab_.assign(static_cast<std::size_t>(m_),
                    std::vector<Rat>(static_cast<std::size_t>(ncols_ + m_ + 1), Rat(0)));
        basis_.resize(static_cast<std::size_t>(m_));
        for (int i = 0; i < m_; ++i) {
            int sign = sys.rhs[static_cast<std::size_t>(i)] < 0 ? -1 : 1;
            for (int c = 0; c < ncols_; ++c) {
                auto [v, s] = col_var_[static_cast<std::size_t>(c)];
                tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
                    Rat(sys.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)]) * s * sign;
            }
            tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(ncols_ + i)] = 1;
            tab_[static_cast<std::size_t>(i)].back() = Rat(sys.rhs[static_cast<std::size_t>(i)]) * sign;
            basis_[static_cast<std::size_t>(i)] = ncols_ + i;
        }
    }

    bool phase1() {
        // maximize -(sum of artificials); feasible iff the optimum is 0
        std::vector<Rat> cost(static_cast<std::size_t>(ncols_ + m_), Rat(0));
        for (int i = 0; i < m_; ++i) cost[static_cast<std::size_t>(ncols_ + i)] = Rat(-1);
        optimize(cost, /*block_artificials=*/false, /*stop_when_positive=*/false);
        if (objective_value(cost) != 0) return false;
        drive_out_artificials();
        return true;
    }

    // Maximize sum of obj over system variables, from the current basis.
    LpResult phase2(const std::vector<Rat>& obj, bool stop_when_positive) {
        std::vector<Rat> cost(static_cast<std::size_t>(ncols_ + m_), Rat(0));
        for (int c = 0; c < ncols_; ++c) {
            auto [v, s] = col_var_[static_cast<std::size_t>(c)];
            cost[static_cast<std::size_t>(c)] = obj[static_cast<std::size_t>(v)] * s;
        }
        bool bounded = optimize(cost, /*block_artificials=*/true, stop_when_positive);
        LpResult res;
        res.status = bounded ? LpStatus::Optimal : LpStatus::Unbounded;
        res.point = extract();
        res.value = 0;
        for (int v = 0; v < sys_.num_vars(); ++v)
            res.value += obj[static_cast<std::size_t>(v)] * res.point[static_cast<std::size_t>(v)];
        return res;
    }

    std::vector<Rat> extract() const {
        std::vector<Rat> x(static_cast<std::size_t>(sys_.num_vars()), Rat(0));
        for (int i = 0; i < m_; ++i) {
            int b = basis_[static_cast<std::size_t>(i)];
            if (b < ncols_) {
                auto [v, s] = col_var_[static_cast<std::size_t>(b)];
                x[static_cast<std::size_t>(v)] += tab_[static_cast<std::size_t>(i)].back() * s;
            }
        }
        return x;
    }

  private:
    Rat objective_value(const std::vector<Rat>& cost) const {
        Rat z = 0;
        for (int i = 0; i < m_; ++i)
            z += cost[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] *
                 tab_[static_cast<std::size_t>(i)].back();
        return z;
    }

    Rat reduced_cost(const std::vector<Rat>& cost, int j) const {
        Rat d = cost[static_cast<std::size_t>(j)];
        for (int i = 0; i < m_; ++i) {
            const Rat& a = tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (a != 0) d -= cost[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] * a;
        }
        return d;
    }

    // Returns false when the objective is unbounded; in that case the tableau
    // is left at the last basis and `extract` plus one unit ray step gives a
    // feasible point with larger objective (handled by the caller via status).
    bool optimize(const std::vector<Rat>& cost, bool block_artificials, bool stop_when_positive) {
        const int total = ncols_ + m_;
        while (true) {
            if (stop_when_positive && objective_value(cost) > 0) return true;
            int enter = -1;
            for (int j = 0; j < total; ++j) {
                if (block_artificials && j >= ncols_) break;
                if (is_basic(j)) continue;
                if (reduced_cost(cost, j) > 0) { enter = j; break; } // Bland: least index
            }
            if (enter < 0) return true;
            int leave = -1;
            Rat best_ratio = 0;
            for (int i = 0; i < m_; ++i) {
                const Rat& a = tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
                if (a <= 0) continue;
                Rat ratio = tab_[static_cast<std::size_t>(i)].back() / a;
                if (leave < 0 || ratio < best_ratio ||
                    (ratio == best_ratio &&
                     basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]))
                {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) { ray_enter_ = enter; return false; }
            pivot(leave, enter);
        }
    }

    bool is_basic(int j) const {
        return std::find(basis_.begin(), basis_.end(), j) != basis_.end();
    }

    void pivot(int row, int col) {
        auto& prow = tab_[static_cast<std::size_t>(row)];
        Rat p = prow[static_cast<std::size_t>(col)];
        for (auto& x : prow) x /= p;
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            Rat f = tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)];
            if (f == 0) continue;
            auto& irow = tab_[static_cast<std::size_t>(i)];
            for (std::size_t j = 0; j < irow.size(); ++j)
                if (prow[j] != 0) irow[j] -= f * prow[j];
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    void drive_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < ncols_) continue;
            int col = -1;
            for (int j = 0; j < ncols_; ++j)
                if (!is_basic(j) && tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0) {
                    col = j;
                    break;
                }
            if (col >= 0) pivot(i, col); // basic artificial sits at 0, pivot keeps feasibility
        }
    }

  public:
    // After an unbounded phase2: a feasible point one unit along the improving ray.
    std::vector<Rat> ray_point() const {
        std::vector<Rat> x = extract();
        auto [v, s] = col_var_[static_cast<std::size_t>(ray_enter_)];
        x[static_cast<std::size_t>(v)] += s;
        std::vector<Rat> adj = x;
        for (int i = 0; i < m_; ++i) {
            int b = basis_[static_cast<std::size_t>(i)];
            if (b < ncols_) {
                auto [bv, bs] = col_var_[static_cast<std::size_t>(b)];
                adj[static_cast<std::size_t>(bv)] -=
                    tab_[static_cast<std::size_t>(i)][static_cast<std::size_t>(ray_enter_)] * bs;
            }
        }
        return adj;
    }

  private:
    const LinearSystem& sys_;
    std::vector<std::pair<int, int>> col_var_; // column -> (variable, sign)
    int ncols_ = 0;
    int m_ = 0;
    std::vector<std::vector<Rat>> tab_;
    std::vector<int> basis_;
    int ray_enter_ = -1;
};

} // namespace detail

/// Exact rational feasibility (phase-1 simplex, Bland's rule).
inline std::optional<std::vector<Rat>> lp_feasible(const LinearSystem& sys) {
    if (sys.trivially_infeasible) return std::nullopt;
    detail::Simplex s(sys);
    if (!s.phase1()) return std::nullopt;
    auto x = s.extract();
    if (!sys.check_point(x)) throw Error("internal: simplex produced an invalid point");
    return x;
}

/// Maximize obj over the feasible region. With stop_when_positive, returns as
/// soon as a feasible point with positive objective is at hand.
inline LpResult lp_maximize(const LinearSystem& sys, const std::vector<Rat>& obj,
                            bool stop_when_positive = false) {
    LpResult res;
    if (sys.trivially_infeasible) return res;
    detail::Simplex s(sys);
    if (!s.phase1()) return res;
    res = s.phase2(obj, stop_when_positive);
    if (res.status == LpStatus::Unbounded) {
        res.point = s.ray_point();
        res.value = 0;
        for (int v = 0; v < sys.num_vars(); ++v)
            res.value += obj[static_cast<std::size_t>(v)] * res.point[static_cast<std::size_t>(v)];
    }
    if (!sys.check_point(res.point)) throw Error("internal: simplex produced an invalid point");
    return res;
}

/// A feasible point of maximal support: a nonnegative variable is zero in the
/// output iff it is zero in every feasible point. Per-variable LPs determine
/// which variables can be positive; the output averages the witnesses.
inline std::vector<Rat> relative_interior_solution(const LinearSystem& sys) {
    auto base = lp_feasible(sys);
    if (!base) throw Error("relative_interior_solution: infeasible system");
    std::vector<std::vector<Rat>> points{*base};
    for (int v = 0; v < sys.num_vars(); ++v) {
        if (!sys.nonneg[static_cast<std::size_t>(v)]) continue;
        bool already_positive = false;
        for (const auto& p : points)
            if (p[static_cast<std::size_t>(v)] > 0) { already_positive = true; break; }
        if (already_positive) continue;
        std::vector<Rat> obj(static_cast<std::size_t>(sys.num_vars()), Rat(0));
        obj[static_cast<std::size_t>(v)] = 1;
        LpResult r = lp_maximize(sys, obj, /*stop_when_positive=*/true);
        if (r.status != LpStatus::Infeasible && r.value > 0) points.push_back(r.point);
    }
    std::vector<Rat> avg(static_cast<std::size_t>(sys.num_vars()), Rat(0));
    for (const auto& p : points)
        for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += p[i];
    Rat k(static_cast<int>(points.size()));
    for (auto& x : avg) x /= k;
    if (!sys.check_point(avg)) throw Error("internal: relative interior point invalid");
    return avg;
}

/// Solves M x = b over the integers via Hermite-style column reduction with
/// arbitrary precision arithmetic. The returned point re-verifies exactly.
inline std::optional<std::vector<Int>> integer_feasible(std::vector<std::vector<Int>> m,
                                                        std::vector<Int> b) {
    const int rows = static_cast<int>(m.size());
    if (static_cast<int>(b.size()) != rows)
        throw Error("integer_feasible: dimension mismatch between matrix and rhs");
    const int cols = rows == 0 ? 0 : static_cast<int>(m[0].size());
    for (const auto& row : m)
        if (static_cast<int>(row.size()) != cols)
            throw Error("integer_feasible: ragged matrix");

    // U tracks column operations: reduced = original * U
    std::vector<std::vector<Int>> u(static_cast<std::size_t>(cols),
                                    std::vector<Int>(static_cast<std::size_t>(cols), Int(0)));
    for (int i = 0; i < cols; ++i) u[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;

    auto col_combine = [&](int j1, int j2, const Int& a11, const Int& a12, const Int& a21,
                           const Int& a22) {
        // (col_j1, col_j2) <- (a11*col_j1 + a12*col_j2, a21*col_j1 + a22*col_j2)
        for (int i = 0; i < rows; ++i) {
            Int x = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j1)];
            Int y = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j2)];
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j1)] = a11 * x + a12 * y;
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j2)] = a21 * x + a22 * y;
        }
        for (int i = 0; i < cols; ++i) {
            Int x = u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j1)];
            Int y = u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j2)];
            u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j1)] = a11 * x + a12 * y;
            u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j2)] = a21 * x + a22 * y;
        }
    };
    auto col_addmul = [&](int dst, int src, const Int& f) { // col_dst += f * col_src
        for (int i = 0; i < rows; ++i)
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(dst)] +=
                f * m[static_cast<std::size_t>(i)][static_cast<std::size_t>(src)];
        for (int i = 0; i < cols; ++i)
            u[static_cast<std::size_t>(i)][static_cast<std::size_t>(dst)] +=
                f * u[static_cast<std::size_t>(i)][static_cast<std::size_t>(src)];
    };
    auto col_swap = [&](int j1, int j2) {
        for (int i = 0; i < rows; ++i)
            std::swap(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j1)],
                      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j2)]);
        for (int i = 0; i < cols; ++i)
            std::swap(u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j1)],
                      u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j2)]);
    };
    auto col_negate = [&](int j) {
        for (int i = 0; i < rows; ++i)
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                -m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        for (int i = 0; i < cols; ++i)
            u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                -u[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    };

    std::vector<int> pivot_row;
    int next = 0; // first unpivoted column
    for (int i = 0; i < rows && next < cols; ++i) {
        // clear row i over columns >= next down to a single entry
        while (true) {
            int j1 = -1, j2 = -1;
            for (int j = next; j < cols; ++j)
                if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0) {
                    if (j1 < 0) j1 = j;
                    else { j2 = j; break; }
                }
            if (j2 < 0) break;
            const Int x = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j1)];
            const Int y = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j2)];
            Int g, s, t;
            {
                Int a = x, bb = y, x0 = 1, x1 = 0, y0 = 0, y1 = 1;
                while (bb != 0) {
                    Int q = a / bb;
                    Int r2 = a - q * bb;
                    a = bb; bb = r2;
                    Int nx = x0 - q * x1; x0 = x1; x1 = nx;
                    Int ny = y0 - q * y1; y0 = y1; y1 = ny;
                }
                if (a < 0) { a = -a; x0 = -x0; y0 = -y0; }
                g = a; s = x0; t = y0;
            }
            col_combine(j1, j2, s, t, -(y / g), x / g); // new j1 entry g, new j2 entry 0
        }
        int jpos = -1;
        for (int j = next; j < cols; ++j)
            if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0) { jpos = j; break; }
        if (jpos < 0) continue; // no pivot in this row
        if (jpos != next) col_swap(jpos, next);
        if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(next)] < 0) col_negate(next);
        // keep earlier pivot columns reduced at this row to limit entry growth
        const Int& p = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(next)];
        for (int k = 0; k < static_cast<int>(pivot_row.size()); ++k) {
            Int& e = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            if (e != 0) {
                Int q = e / p;
                if (e - q * p < 0) q -= 1; // floor division
                if (q != 0) col_addmul(k, next, -q);
            }
        }
        pivot_row.push_back(i);
        ++next;
    }

    // forward substitution on the echelon columns
    std::vector<Int> residual = b;
    std::vector<Int> y(static_cast<std::size_t>(cols), Int(0));
    for (int k = 0; k < static_cast<int>(pivot_row.size()); ++k) {
        int i = pivot_row[static_cast<std::size_t>(k)];
        const Int& p = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        if (residual[static_cast<std::size_t>(i)] % p != 0) return std::nullopt;
        Int yk = residual[static_cast<std::size_t>(i)] / p;
        if (yk != 0)
            for (int r = 0; r < rows; ++r)
                residual[static_cast<std::size_t>(r)] -=
                    yk * m[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(k)] = yk;
    }
    for (const auto& r : residual)
        if (r != 0) return std::nullopt;

    std::vector<Int> x(static_cast<std::size_t>(cols), Int(0));
    for (int k = 0; k < cols; ++k) {
        if (y[static_cast<std::size_t>(k)] == 0) continue;
        for (int i = 0; i < cols; ++i)
            x[static_cast<std::size_t>(i)] +=
                y[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    return x;
}

/// integer_feasible over a LinearSystem (sign restrictions ignored).
inline std::optional<std::vector<Int>> integer_feasible(const LinearSystem& sys) {
    if (sys.trivially_infeasible) return std::nullopt;
    if (sys.rows.empty()) return std::vector<Int>(static_cast<std::size_t>(sys.num_vars()), Int(0));
    auto x = integer_feasible(sys.rows, sys.rhs);
    if (x && !sys.check_integer_point(*x))
        throw Error("internal: integer solver produced an invalid point");
    return x;
}

} // namespace pcsp
