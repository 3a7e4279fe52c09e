#include "rcmdp/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcmdp::lp {

LinearProgram::LinearProgram(std::size_t n_variables)
    : objective(n_variables, 0.0), lower(n_variables, 0.0), upper(n_variables, kInfinity) {}

std::size_t LinearProgram::add_eq(Row row, double rhs, std::string name) {
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(rhs);
    eq_names.push_back(std::move(name));
    return eq_rows.size() - 1;
}

std::size_t LinearProgram::add_le(Row row, double rhs, std::string name) {
    le_rows.push_back(std::move(row));
    le_rhs.push_back(rhs);
    le_names.push_back(std::move(name));
    return le_rows.size() - 1;
}

std::size_t LinearProgram::add_ge(Row row, double rhs, std::string name) {
    for (double& v : row) v = -v;
    return add_le(std::move(row), -rhs, std::move(name));
}

const char* to_string(Status status) {
    switch (status) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
        case Status::numerical: return "numerical";
    }
    return "unknown";
}

namespace {

void check_well_formed(const LinearProgram& lp) {
    const std::size_t n = lp.n_variables();
    if (lp.lower.size() != n || lp.upper.size() != n)
        throw std::invalid_argument("LinearProgram: bound vectors must match the variable count");
    if (lp.eq_rows.size() != lp.eq_rhs.size() || lp.le_rows.size() != lp.le_rhs.size())
        throw std::invalid_argument("LinearProgram: row and rhs counts differ");
    for (const auto& r : lp.eq_rows)
        if (r.size() != n) throw std::invalid_argument("LinearProgram: equality row width mismatch");
    for (const auto& r : lp.le_rows)
        if (r.size() != n) throw std::invalid_argument("LinearProgram: inequality row width mismatch");
    for (double b : lp.eq_rhs)
        if (!std::isfinite(b)) throw std::invalid_argument("LinearProgram: non-finite rhs");
    for (double b : lp.le_rhs)
        if (!std::isfinite(b)) throw std::invalid_argument("LinearProgram: non-finite rhs");
    for (double c : lp.objective)
        if (!std::isfinite(c)) throw std::invalid_argument("LinearProgram: non-finite objective coefficient");
    for (std::size_t j = 0; j < n; ++j) {
        if (lp.lower[j] == kInfinity || lp.upper[j] == -kInfinity || std::isnan(lp.lower[j]) ||
            std::isnan(lp.upper[j]) || lp.lower[j] > lp.upper[j])
            throw std::invalid_argument("LinearProgram: inconsistent bounds on variable " + std::to_string(j));
    }
}

// x_j = offset + sum coef * internal column
struct VarMap {
    double offset = 0.0;
    std::vector<std::pair<std::size_t, double>> terms;
};

struct StandardForm {
    std::size_t m = 0;
    std::size_t n_struct = 0, n_slack = 0, n_art = 0;
    std::size_t n_cols() const { return n_struct + n_slack + n_art; }
    std::vector<VarMap> vars;
    std::vector<double> cost;           // per column, artificials 0
    std::vector<double> sign;           // row multiplier applied to make rhs >= 0
    std::vector<double> rhs;            // after sign flip
    std::vector<std::vector<std::pair<std::size_t, double>>> columns;  // sparse, after sign flip
    std::vector<std::size_t> initial_basis;
    std::size_t n_eq = 0, n_le = 0;     // original rows; upper-bound rows follow
    std::vector<std::size_t> ub_var;    // original variable of each upper-bound row
};

StandardForm to_standard_form(const LinearProgram& lp) {
    StandardForm sf;
    const std::size_t n = lp.n_variables();
    sf.vars.resize(n);
    std::vector<double> struct_cost;
    std::vector<std::pair<std::size_t, double>> ub_rows;  // (internal col, bound)
    for (std::size_t j = 0; j < n; ++j) {
        const double l = lp.lower[j], u = lp.upper[j];
        VarMap& vm = sf.vars[j];
        if (std::isfinite(l)) {
            vm.offset = l;
            vm.terms.push_back({struct_cost.size(), 1.0});
            if (std::isfinite(u)) {
                ub_rows.push_back({struct_cost.size(), u - l});
                sf.ub_var.push_back(j);
            }
            struct_cost.push_back(lp.objective[j]);
        } else if (std::isfinite(u)) {
            vm.offset = u;
            vm.terms.push_back({struct_cost.size(), -1.0});
            struct_cost.push_back(-lp.objective[j]);
        } else {
            vm.terms.push_back({struct_cost.size(), 1.0});
            struct_cost.push_back(lp.objective[j]);
            vm.terms.push_back({struct_cost.size(), -1.0});
            struct_cost.push_back(-lp.objective[j]);
        }
    }
    sf.n_struct = struct_cost.size();
    sf.n_eq = lp.eq_rows.size();
    sf.n_le = lp.le_rows.size();
    sf.m = sf.n_eq + sf.n_le + ub_rows.size();
    sf.n_slack = sf.n_le + ub_rows.size();

    // Row-wise dense internal coefficients before the sign flip.
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(sf.m);
    std::vector<double> rhs(sf.m);
    auto add_row = [&](std::size_t i, const Row& row, double b) {
        std::vector<double> dense(sf.n_struct, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (row[j] == 0.0) continue;
            b -= row[j] * sf.vars[j].offset;
            for (auto [col, coef] : sf.vars[j].terms) dense[col] += row[j] * coef;
        }
        for (std::size_t c = 0; c < sf.n_struct; ++c)
            if (dense[c] != 0.0) rows[i].push_back({c, dense[c]});
        rhs[i] = b;
    };
    for (std::size_t i = 0; i < sf.n_eq; ++i) add_row(i, lp.eq_rows[i], lp.eq_rhs[i]);
    for (std::size_t i = 0; i < sf.n_le; ++i) add_row(sf.n_eq + i, lp.le_rows[i], lp.le_rhs[i]);
    for (std::size_t k = 0; k < ub_rows.size(); ++k) {
        rows[sf.n_eq + sf.n_le + k].push_back({ub_rows[k].first, 1.0});
        rhs[sf.n_eq + sf.n_le + k] = ub_rows[k].second;
    }

    sf.sign.assign(sf.m, 1.0);
    for (std::size_t i = 0; i < sf.m; ++i)
        if (rhs[i] < 0.0) sf.sign[i] = -1.0;

    std::size_t n_art = 0;
    for (std::size_t i = 0; i < sf.m; ++i)
        if (i < sf.n_eq || sf.sign[i] < 0.0) ++n_art;
    sf.n_art = n_art;

    sf.columns.assign(sf.n_cols(), {});
    sf.cost.assign(sf.n_cols(), 0.0);
    std::copy(struct_cost.begin(), struct_cost.end(), sf.cost.begin());
    sf.rhs.resize(sf.m);
    sf.initial_basis.resize(sf.m);
    std::size_t art = sf.n_struct + sf.n_slack;
    for (std::size_t i = 0; i < sf.m; ++i) {
        const double s = sf.sign[i];
        for (auto [c, v] : rows[i]) sf.columns[c].push_back({i, s * v});
        sf.rhs[i] = s * rhs[i];
        if (i >= sf.n_eq) {
            const std::size_t slack = sf.n_struct + (i - sf.n_eq);
            sf.columns[slack].push_back({i, s});
            if (s > 0.0) {
                sf.initial_basis[i] = slack;
                continue;
            }
        }
        sf.columns[art].push_back({i, 1.0});
        sf.initial_basis[i] = art++;
    }
    return sf;
}

class Tableau {
public:
    Tableau(const StandardForm& sf, const Tolerances& tol)
        : sf_(sf), tol_(tol), m_(sf.m), n_(sf.n_cols()), stride_(n_ + 1), data_(m_ * stride_, 0.0),
          obj_(stride_, 0.0), basis_(sf.initial_basis) {
        for (std::size_t c = 0; c < n_; ++c)
            for (auto [i, v] : sf.columns[c]) at(i, c) = v;
        for (std::size_t i = 0; i < m_; ++i) at(i, n_) = sf.rhs[i];
    }

    bool is_artificial(std::size_t c) const { return c >= sf_.n_struct + sf_.n_slack; }
    const std::vector<std::size_t>& basis() const { return basis_; }
    std::size_t pivots() const { return pivots_; }
    double rhs(std::size_t i) const { return data_[i * stride_ + n_]; }
    double objective_value() const { return -obj_[n_]; }

    void load_objective(const std::vector<double>& cost) {
        std::fill(obj_.begin(), obj_.end(), 0.0);
        for (std::size_t c = 0; c < n_; ++c) obj_[c] = cost[c];
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            const double* row = &data_[i * stride_];
            for (std::size_t c = 0; c <= n_; ++c) obj_[c] -= cb * row[c];
        }
    }

    enum class Outcome { optimal, unbounded, limit };

    Outcome optimize() {
        std::size_t degenerate_run = 0;
        bool bland = false;
        while (true) {
            if (pivots_ >= tol_.max_pivots) return Outcome::limit;
            const long q = price(bland);
            if (q < 0) return Outcome::optimal;
            const long p = ratio_test(static_cast<std::size_t>(q), bland);
            if (p < 0) return Outcome::unbounded;
            const double step = std::max(0.0, rhs(p)) / at(p, q);
            pivot(static_cast<std::size_t>(p), static_cast<std::size_t>(q));
            if (step <= 1e-14) {
                if (++degenerate_run > 50) bland = true;
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }

    // Pivots basic artificials at zero level out of the basis where possible.
    void expel_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (!is_artificial(basis_[i])) continue;
            long best = -1;
            double best_abs = tol_.pivot * 100;
            for (std::size_t c = 0; c < sf_.n_struct + sf_.n_slack; ++c) {
                const double v = std::abs(at(i, c));
                if (v > best_abs) {
                    best_abs = v;
                    best = static_cast<long>(c);
                }
            }
            if (best >= 0) pivot(i, static_cast<std::size_t>(best));
        }
    }

    // Dual simplex from a dual feasible basis until the rhs is nonnegative.
    // Returns false if some row proves primal infeasibility or the limit is hit.
    bool restore_primal() {
        while (true) {
            if (pivots_ >= tol_.max_pivots) return false;
            long p = -1;
            double worst = -tol_.feasibility;
            for (std::size_t i = 0; i < m_; ++i)
                if (rhs(i) < worst) {
                    worst = rhs(i);
                    p = static_cast<long>(i);
                }
            if (p < 0) return true;
            long q = -1;
            double best = kInfinity;
            for (std::size_t c = 0; c < n_; ++c) {
                if (is_artificial(c)) continue;
                const double a = at(static_cast<std::size_t>(p), c);
                if (a >= -tol_.pivot) continue;
                const double ratio = std::max(0.0, obj_[c]) / -a;
                if (q < 0 || ratio < best - 1e-12 * (1.0 + best)) {
                    best = ratio;
                    q = static_cast<long>(c);
                }
            }
            if (q < 0) return false;
            pivot(static_cast<std::size_t>(p), static_cast<std::size_t>(q));
        }
    }

    // Recomputes B^-1 [A | b] from the original data for the current basis.
    bool reinvert() {
        if (m_ == 0) return true;
        const auto M = static_cast<Eigen::Index>(m_);
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(M, M);
        for (std::size_t k = 0; k < m_; ++k)
            for (auto [i, v] : sf_.columns[basis_[k]]) B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, static_cast<Eigen::Index>(stride_));
        for (std::size_t c = 0; c < n_; ++c)
            for (auto [i, v] : sf_.columns[c]) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v;
        for (std::size_t i = 0; i < m_; ++i) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n_)) = sf_.rhs[i];
        const Eigen::MatrixXd T = lu.solve(A);
        if (!T.allFinite()) return false;
        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t c = 0; c <= n_; ++c) {
                double v = T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
                if (std::abs(v) < 1e-14) v = 0.0;
                at(i, c) = v;
            }
        for (std::size_t k = 0; k < m_; ++k) {
            for (std::size_t i = 0; i < m_; ++i) at(i, basis_[k]) = 0.0;
            at(k, basis_[k]) = 1.0;
            if (rhs(k) < 0.0 && rhs(k) > -tol_.feasibility) at(k, n_) = 0.0;
        }
        return true;
    }

private:
    double& at(std::size_t i, std::size_t c) { return data_[i * stride_ + c]; }
    double at(std::size_t i, std::size_t c) const { return data_[i * stride_ + c]; }

    long price(bool bland) const {
        long q = -1;
        double best = -tol_.optimality;
        for (std::size_t c = 0; c < n_; ++c) {
            if (is_artificial(c)) continue;
            const double d = obj_[c];
            if (d < best) {
                q = static_cast<long>(c);
                if (bland) break;
                best = d;
            }
        }
        return q;
    }

    // Harris two-pass ratio test: bound the step with rhs relaxed by the
    // feasibility tolerance, then take the largest pivot within that bound.
    // Under Bland's rule ties go to the smallest basic column instead.
    long ratio_test(std::size_t q, bool bland) const {
        double bound = kInfinity;
        for (std::size_t i = 0; i < m_; ++i) {
            const double a = at(i, q);
            if (a <= tol_.pivot) continue;
            bound = std::min(bound, (std::max(0.0, rhs(i)) + tol_.feasibility) / a);
        }
        if (bound == kInfinity) return -1;
        long p = -1;
        double best_pivot = 0.0, best_ratio = kInfinity;
        for (std::size_t i = 0; i < m_; ++i) {
            const double a = at(i, q);
            if (a <= tol_.pivot) continue;
            const double ratio = std::max(0.0, rhs(i)) / a;
            if (ratio > bound) continue;
            bool take = p < 0;
            if (!take && bland)
                take = ratio < best_ratio - 1e-12 * (1.0 + best_ratio) ||
                       (ratio <= best_ratio + 1e-12 * (1.0 + best_ratio) && basis_[i] < basis_[static_cast<std::size_t>(p)]);
            else if (!take)
                take = a > best_pivot * (1.0 + 1e-9);
            if (take) {
                p = static_cast<long>(i);
                best_pivot = a;
                best_ratio = ratio;
            }
        }
        return p;
    }

    void pivot(std::size_t p, std::size_t q) {
        double* prow = &data_[p * stride_];
        const double inv = 1.0 / prow[q];
        nz_.clear();
        for (std::size_t c = 0; c <= n_; ++c) {
            if (prow[c] == 0.0) continue;
            prow[c] *= inv;
            nz_.push_back(c);
        }
        prow[q] = 1.0;
        auto eliminate = [&](double* row) {
            const double f = row[q];
            if (f == 0.0) return;
            for (std::size_t c : nz_) row[c] -= f * prow[c];
            row[q] = 0.0;
        };
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == p) continue;
            double* row = &data_[i * stride_];
            eliminate(row);
            if (row[n_] < 0.0 && row[n_] > -tol_.feasibility) row[n_] = 0.0;
        }
        eliminate(obj_.data());
        basis_[p] = q;
        ++pivots_;
    }

    const StandardForm& sf_;
    Tolerances tol_;
    std::size_t m_, n_, stride_;
    std::vector<double> data_;
    std::vector<double> obj_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> nz_;
    std::size_t pivots_ = 0;
};

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

Residuals kkt_residuals(const LinearProgram& lp, const LpSolution& sol) {
    Residuals r;
    const std::size_t n = lp.n_variables();
    auto dot = [&](const Row& row) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += row[j] * sol.x[j];
        return s;
    };
    for (std::size_t i = 0; i < lp.eq_rows.size(); ++i)
        r.primal = std::max(r.primal, std::abs(dot(lp.eq_rows[i]) - lp.eq_rhs[i]));
    for (std::size_t i = 0; i < lp.le_rows.size(); ++i) {
        const double slack = lp.le_rhs[i] - dot(lp.le_rows[i]);
        r.primal = std::max(r.primal, -slack);
        if (i < sol.le_duals.size()) {
            r.dual = std::max(r.dual, sol.le_duals[i]);
            r.complementarity = std::max(r.complementarity, std::abs(sol.le_duals[i] * slack));
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        r.primal = std::max(r.primal, lp.lower[j] - sol.x[j]);
        r.primal = std::max(r.primal, sol.x[j] - lp.upper[j]);
        if (j >= sol.reduced_costs.size()) continue;
        const double d = sol.reduced_costs[j];
        if (d > 0.0) {
            if (std::isfinite(lp.lower[j]))
                r.complementarity = std::max(r.complementarity, d * (sol.x[j] - lp.lower[j]));
            else
                r.dual = std::max(r.dual, d);
        } else if (d < 0.0) {
            if (std::isfinite(lp.upper[j]))
                r.complementarity = std::max(r.complementarity, -d * (lp.upper[j] - sol.x[j]));
            else
                r.dual = std::max(r.dual, -d);
        }
    }
    r.duality_gap = std::abs(sol.objective - sol.dual_objective);
    return r;
}

LpSolution solve(const LinearProgram& lp, const Tolerances& tol) {
    check_well_formed(lp);
    const StandardForm sf = to_standard_form(lp);
    LpSolution sol;
    const double b_scale = std::max(1.0, inf_norm(sf.rhs));

    Tableau tab(sf, tol);
    if (sf.n_art > 0) {
        std::vector<double> phase1(sf.n_cols(), 0.0);
        for (std::size_t c = sf.n_struct + sf.n_slack; c < sf.n_cols(); ++c) phase1[c] = 1.0;
        tab.load_objective(phase1);
        const auto outcome = tab.optimize();
        sol.phase1_pivots = tab.pivots();
        if (outcome == Tableau::Outcome::limit) {
            sol.status = Status::numerical;
            sol.message = "pivot limit reached in phase 1";
            return sol;
        }
        if (tab.objective_value() > tol.feasibility * b_scale) {
            sol.status = Status::infeasible;
            sol.message = "phase 1 optimum is positive";
            return sol;
        }
        tab.expel_artificials();
    }
    const std::size_t m = sf.m;
    std::vector<double> xs(sf.n_cols(), 0.0);
    std::vector<double> y(m, 0.0);
    double c_scale = 1.0;
    for (double c : sf.cost) c_scale = std::max(c_scale, std::abs(c));

    // Phase 2, then re-solve the final basis from the original data. Drift in
    // the tableau can leave a basis that is optimal only to rounding; in that
    // case the tableau is rebuilt from the basis and the pivoting resumes.
    const std::size_t before = tab.pivots();
    constexpr int kRounds = 4;
    for (int round = 0;; ++round) {
        tab.load_objective(sf.cost);
        const auto outcome = tab.optimize();
        sol.phase2_pivots = tab.pivots() - before;
        if (outcome == Tableau::Outcome::unbounded) {
            // A drifted reduced cost can fake a ray; confirm on a fresh tableau.
            if (round + 1 < kRounds && tab.reinvert()) continue;
            sol.status = Status::unbounded;
            sol.message = "objective unbounded below";
            return sol;
        }
        if (outcome == Tableau::Outcome::limit) {
            sol.status = Status::numerical;
            sol.message = "pivot limit reached in phase 2";
            return sol;
        }

        const auto& basis = tab.basis();
        bool primal_feasible = true;
        std::fill(xs.begin(), xs.end(), 0.0);
        std::fill(y.begin(), y.end(), 0.0);
        if (m > 0) {
            Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
            Eigen::VectorXd b(static_cast<Eigen::Index>(m)), cb(static_cast<Eigen::Index>(m));
            for (std::size_t k = 0; k < m; ++k) {
                for (auto [i, v] : sf.columns[basis[k]]) B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
                cb(static_cast<Eigen::Index>(k)) = sf.cost[basis[k]];
            }
            for (std::size_t i = 0; i < m; ++i) b(static_cast<Eigen::Index>(i)) = sf.rhs[i];
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
            const Eigen::VectorXd xb = lu.solve(b);
            const Eigen::VectorXd yy = lu.transpose().solve(cb);
            for (std::size_t k = 0; k < m; ++k) {
                double v = xb(static_cast<Eigen::Index>(k));
                if (!std::isfinite(v)) {
                    sol.status = Status::numerical;
                    sol.message = "singular final basis";
                    return sol;
                }
                if (v < 0.0) {
                    if (v < -tol.feasibility * b_scale * 10) primal_feasible = false;
                    v = 0.0;
                }
                xs[basis[k]] = v;
            }
            for (std::size_t i = 0; i < m; ++i) y[i] = yy(static_cast<Eigen::Index>(i));
        }

        bool dual_feasible = true;
        for (std::size_t c = 0; c < sf.n_struct + sf.n_slack && dual_feasible; ++c) {
            double d = sf.cost[c];
            for (auto [i, v] : sf.columns[c]) d -= y[i] * v;
            if (d < -tol.optimality * c_scale * 10) dual_feasible = false;
        }
        if (dual_feasible && primal_feasible) break;
        if (round + 1 == kRounds || !tab.reinvert()) {
            sol.status = Status::numerical;
            sol.message = primal_feasible ? "refined basis is not dual feasible" : "refined basic solution is infeasible";
            return sol;
        }
        if (!primal_feasible) {
            tab.load_objective(sf.cost);
            if (!tab.restore_primal()) {
                sol.status = Status::numerical;
                sol.message = "could not restore primal feasibility of the refined basis";
                return sol;
            }
        }
    }

    const std::size_t n = lp.n_variables();
    sol.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double v = sf.vars[j].offset;
        for (auto [col, coef] : sf.vars[j].terms) v += coef * xs[col];
        sol.x[j] = v;
    }
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) sol.objective += lp.objective[j] * sol.x[j];

    sol.eq_duals.assign(lp.eq_rows.size(), 0.0);
    sol.le_duals.assign(lp.le_rows.size(), 0.0);
    for (std::size_t i = 0; i < sf.n_eq; ++i) sol.eq_duals[i] = sf.sign[i] * y[i];
    for (std::size_t i = 0; i < sf.n_le; ++i) sol.le_duals[i] = std::min(0.0, sf.sign[sf.n_eq + i] * y[sf.n_eq + i]);

    sol.reduced_costs = lp.objective;
    for (std::size_t i = 0; i < lp.eq_rows.size(); ++i)
        for (std::size_t j = 0; j < n; ++j) sol.reduced_costs[j] -= sol.eq_duals[i] * lp.eq_rows[i][j];
    for (std::size_t i = 0; i < lp.le_rows.size(); ++i)
        for (std::size_t j = 0; j < n; ++j) sol.reduced_costs[j] -= sol.le_duals[i] * lp.le_rows[i][j];

    sol.dual_objective = 0.0;
    for (std::size_t i = 0; i < lp.eq_rows.size(); ++i) sol.dual_objective += sol.eq_duals[i] * lp.eq_rhs[i];
    for (std::size_t i = 0; i < lp.le_rows.size(); ++i) sol.dual_objective += sol.le_duals[i] * lp.le_rhs[i];
    for (std::size_t j = 0; j < n; ++j) {
        const double d = sol.reduced_costs[j];
        if (d > 0.0 && std::isfinite(lp.lower[j])) sol.dual_objective += d * lp.lower[j];
        if (d < 0.0 && std::isfinite(lp.upper[j])) sol.dual_objective += d * lp.upper[j];
    }

    sol.residuals = kkt_residuals(lp, sol);
    const double limit = 1e-8 * b_scale;
    if (sol.residuals.primal > limit || sol.residuals.complementarity > 1e-8 * b_scale * c_scale) {
        sol.status = Status::numerical;
        sol.message = "KKT residuals above tolerance";
        return sol;
    }
    sol.status = Status::optimal;
    return sol;
}

}  // namespace rcmdp::lp
