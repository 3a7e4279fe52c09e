#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace rcmdp::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Row of a dense constraint matrix.
using Row = std::vector<double>;

/**
 * Linear program in the form
 *
 *     minimize    c'x
 *     subject to  A_eq x  = b_eq
 *                 A_le x <= b_le
 *                 lower <= x <= upper
 *
 * Lower bounds default to 0 and upper bounds to +infinity. A lower bound of
 * -infinity is allowed (the variable is split internally).
 */
struct LinearProgram {
    std::vector<double> objective;
    std::vector<Row> eq_rows;
    std::vector<double> eq_rhs;
    std::vector<Row> le_rows;
    std::vector<double> le_rhs;
    std::vector<double> lower;
    std::vector<double> upper;
    /// Optional names, used by the MPS export only.
    std::vector<std::string> variable_names;
    std::vector<std::string> eq_names;
    std::vector<std::string> le_names;

    explicit LinearProgram(std::size_t n_variables = 0);

    std::size_t n_variables() const { return objective.size(); }
    std::size_t add_eq(Row row, double rhs, std::string name = {});
    std::size_t add_le(Row row, double rhs, std::string name = {});
    /// Adds `row >= rhs` as `-row <= -rhs`.
    std::size_t add_ge(Row row, double rhs, std::string name = {});
};

enum class Status { optimal, infeasible, unbounded, numerical };

const char* to_string(Status status);

struct Tolerances {
    double feasibility = 1e-9;
    double optimality = 1e-9;
    double pivot = 1e-9;
    std::size_t max_pivots = 500000;
};

struct Residuals {
    double primal = 0.0;           ///< max violation of rows and bounds
    double dual = 0.0;             ///< max dual sign violation (reduced costs and row duals)
    double complementarity = 0.0;  ///< max |dual * slack|
    double duality_gap = 0.0;      ///< |primal objective - dual objective|
};

struct LpSolution {
    Status status = Status::numerical;
    std::vector<double> x;
    double objective = 0.0;
    /// Row duals in the sign convention of the Lagrangian c'x - y'(Ax - b):
    /// free for equalities, <= 0 for <= rows.
    std::vector<double> eq_duals;
    std::vector<double> le_duals;
    std::vector<double> reduced_costs;
    double dual_objective = 0.0;
    Residuals residuals;
    std::size_t phase1_pivots = 0;
    std::size_t phase2_pivots = 0;
    std::string message;
};

/**
 * Dense two-phase primal simplex.
 *
 * Pricing uses the most negative reduced cost and switches to Bland's rule
 * after a run of degenerate pivots; ties are always broken by the lowest
 * column or basis index, so identical inputs give identical outputs. The
 * final basis is re-solved from the original data with a partial-pivoting
 * LU factorization and the KKT residuals are checked; a basis that does not
 * pass is reported as Status::numerical rather than optimal.
 *
 * Throws std::invalid_argument on a malformed program (row width mismatch,
 * non-finite rhs, inconsistent bounds).
 */
LpSolution solve(const LinearProgram& lp, const Tolerances& tol = {});

/// Recomputes the residuals of a candidate primal/dual pair against `lp`.
Residuals kkt_residuals(const LinearProgram& lp, const LpSolution& sol);

/// Writes the program in fixed-format MPS.
void write_mps(std::ostream& out, const LinearProgram& lp, const std::string& name = "RCMDP");

}  // namespace rcmdp::lp
