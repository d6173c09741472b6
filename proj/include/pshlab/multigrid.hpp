#pragma once

// Multigrid-preconditioned conjugate gradients for the five-point operator
//
//     (A x)_k = 4 x_k - sum of x over the free 4-neighbours of k
//
// restricted to the "free" nodes of a rectangular lattice. Non-free nodes hold
// zero in every vector. The V-cycle uses red-black Gauss-Seidel with mirrored
// colour order before and after the coarse correction, and full weighting as
// the transpose of bilinear prolongation, so the preconditioner is symmetric.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace pshlab::detail {

class MultigridPoisson {
public:
    MultigridPoisson(int nx, int ny, std::vector<std::uint8_t> free) {
        levels_.push_back(make_level(nx, ny, std::move(free)));
        while (levels_.back().nx > kCoarsest && levels_.back().ny > kCoarsest) {
            const Level& f = levels_.back();
            const int cx = (f.nx + 1) / 2;
            const int cy = (f.ny + 1) / 2;
            std::vector<std::uint8_t> cf(static_cast<std::size_t>(cx) * static_cast<std::size_t>(cy), 0);
            std::size_t n_free = 0;
            for (int j = 1; j + 1 < cy; ++j) {
                for (int i = 1; i + 1 < cx; ++i) {
                    if (2 * i < f.nx && 2 * j < f.ny && f.free[f.at(2 * i, 2 * j)]) {
                        cf[static_cast<std::size_t>(j) * cx + i] = 1;
                        ++n_free;
                    }
                }
            }
            if (n_free == 0) break;
            levels_.push_back(make_level(cx, cy, std::move(cf)));
        }
    }

    std::size_t levels() const { return levels_.size(); }

    /// Solves A x = b in place. Stops once max |b - A x| / 4 <= target.
    /// Returns the iteration count; final_defect receives the achieved value.
    std::size_t solve(std::vector<double>& x, const std::vector<double>& b, double target, std::size_t max_iter,
                      double& final_defect) {
        Level& L = levels_.front();
        const std::size_t n = L.free.size();
        std::vector<double> r(n, 0.0), z(n, 0.0), p(n, 0.0), q(n, 0.0);
        apply(L, x, q);
        for (std::size_t k = 0; k < n; ++k) r[k] = L.free[k] ? b[k] - q[k] : 0.0;
        final_defect = max_abs(r) / 4.0;
        if (final_defect <= target) return 0;
        precondition(r, z);
        p = z;
        double rz = dot(r, z);
        std::size_t it = 0;
        while (it < max_iter) {
            ++it;
            apply(L, p, q);
            const double pq = dot(p, q);
            if (!(pq > 0.0)) break;
            const double alpha = rz / pq;
            for (std::size_t k = 0; k < n; ++k) {
                x[k] += alpha * p[k];
                r[k] -= alpha * q[k];
            }
            const double defect = max_abs(r) / 4.0;
            if (defect <= target) {
                final_defect = defect;
                break;
            }
            // Stagnation at round-off level: keep the best iterate and stop.
            if (it > 8 && defect >= 0.999 * final_defect && defect < 1e-13) {
                final_defect = defect;
                break;
            }
            final_defect = defect;
            precondition(r, z);
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
        }
        // True defect of the returned iterate.
        apply(L, x, q);
        double d = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (L.free[k]) d = std::max(d, std::abs(b[k] - q[k]));
        }
        final_defect = d / 4.0;
        return it;
    }

private:
    static constexpr int kCoarsest = 9;
    static constexpr int kSmooth = 2;
    static constexpr int kCoarseSweeps = 40;

    struct Level {
        int nx = 0;
        int ny = 0;
        std::vector<std::uint8_t> free;
        std::vector<double> x;
        std::vector<double> b;
        std::vector<double> r;
        std::size_t at(int i, int j) const {
            return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
        }
    };

    static Level make_level(int nx, int ny, std::vector<std::uint8_t> free) {
        Level L;
        L.nx = nx;
        L.ny = ny;
        const std::size_t n = free.size();
        L.free = std::move(free);
        L.x.assign(n, 0.0);
        L.b.assign(n, 0.0);
        L.r.assign(n, 0.0);
        return L;
    }

    static double dot(const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
        return s;
    }
    static double max_abs(const std::vector<double>& a) {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::abs(v));
        return m;
    }

    static void apply(const Level& L, const std::vector<double>& x, std::vector<double>& y) {
        const std::size_t nx = static_cast<std::size_t>(L.nx);
        std::fill(y.begin(), y.end(), 0.0);
        for (int j = 1; j + 1 < L.ny; ++j) {
            for (int i = 1; i + 1 < L.nx; ++i) {
                const std::size_t k = L.at(i, j);
                if (!L.free[k]) continue;
                y[k] = 4.0 * x[k] - x[k - 1] - x[k + 1] - x[k - nx] - x[k + nx];
            }
        }
    }

    static void sweep_colour(Level& L, int colour) {
        const std::size_t nx = static_cast<std::size_t>(L.nx);
        for (int j = 1; j + 1 < L.ny; ++j) {
            for (int i = 1 + ((j + 1 + colour) & 1); i + 1 < L.nx; i += 2) {
                const std::size_t k = L.at(i, j);
                if (!L.free[k]) continue;
                L.x[k] = 0.25 * (L.b[k] + L.x[k - 1] + L.x[k + 1] + L.x[k - nx] + L.x[k + nx]);
            }
        }
    }

    static void residual(Level& L) {
        apply(L, L.x, L.r);
        for (std::size_t k = 0; k < L.r.size(); ++k) L.r[k] = L.free[k] ? L.b[k] - L.r[k] : 0.0;
    }

    // coarse b = P^T (fine r)
    static void restrict_to(const Level& f, Level& c) {
        std::fill(c.b.begin(), c.b.end(), 0.0);
        for (int J = 1; J + 1 < c.ny; ++J) {
            for (int I = 1; I + 1 < c.nx; ++I) {
                const std::size_t K = c.at(I, J);
                if (!c.free[K]) continue;
                double s = 0.0;
                for (int dj = -1; dj <= 1; ++dj) {
                    for (int di = -1; di <= 1; ++di) {
                        const int i = 2 * I + di;
                        const int j = 2 * J + dj;
                        if (i < 0 || j < 0 || i >= f.nx || j >= f.ny) continue;
                        const double w = (di == 0 ? 1.0 : 0.5) * (dj == 0 ? 1.0 : 0.5);
                        s += w * f.r[f.at(i, j)];
                    }
                }
                c.b[K] = s;
            }
        }
    }

    // fine x += P (coarse x)
    static void prolong_add(const Level& c, Level& f) {
        for (int j = 1; j + 1 < f.ny; ++j) {
            const int J0 = j / 2;
            const bool jodd = (j & 1) != 0;
            for (int i = 1; i + 1 < f.nx; ++i) {
                const std::size_t k = f.at(i, j);
                if (!f.free[k]) continue;
                const int I0 = i / 2;
                const bool iodd = (i & 1) != 0;
                auto cv = [&](int I, int J) -> double {
                    if (I >= c.nx || J >= c.ny) return 0.0;
                    return c.x[c.at(I, J)];
                };
                double v;
                if (!iodd && !jodd) {
                    v = cv(I0, J0);
                } else if (iodd && !jodd) {
                    v = 0.5 * (cv(I0, J0) + cv(I0 + 1, J0));
                } else if (!iodd && jodd) {
                    v = 0.5 * (cv(I0, J0) + cv(I0, J0 + 1));
                } else {
                    v = 0.25 * (cv(I0, J0) + cv(I0 + 1, J0) + cv(I0, J0 + 1) + cv(I0 + 1, J0 + 1));
                }
                f.x[k] += v;
            }
        }
    }

    void vcycle(std::size_t l) {
        Level& L = levels_[l];
        if (l + 1 == levels_.size()) {
            for (int s = 0; s < kCoarseSweeps; ++s) {
                sweep_colour(L, 0);
                sweep_colour(L, 1);
            }
            for (int s = 0; s < kCoarseSweeps; ++s) {
                sweep_colour(L, 1);
                sweep_colour(L, 0);
            }
            return;
        }
        for (int s = 0; s < kSmooth; ++s) {
            sweep_colour(L, 0);
            sweep_colour(L, 1);
        }
        residual(L);
        Level& C = levels_[l + 1];
        restrict_to(L, C);
        std::fill(C.x.begin(), C.x.end(), 0.0);
        vcycle(l + 1);
        prolong_add(C, L);
        for (int s = 0; s < kSmooth; ++s) {
            sweep_colour(L, 1);
            sweep_colour(L, 0);
        }
    }

    void precondition(const std::vector<double>& r, std::vector<double>& z) {
        Level& L = levels_.front();
        L.b = r;
        std::fill(L.x.begin(), L.x.end(), 0.0);
        vcycle(0);
        z = L.x;
    }

    std::vector<Level> levels_;
};

}  // namespace pshlab::detail
