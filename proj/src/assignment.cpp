#include "rcmdp/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace rcmdp::assign {

TaInstance::TaInstance(std::vector<double> pf, int team_size) : pf_(std::move(pf)), team_size_(team_size) {
    if (pf_.empty()) throw std::invalid_argument("TaInstance: no targets");
    for (double p : pf_)
        if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("TaInstance: PF must lie strictly inside (0,1); preprocess first");
    if (team_size_ < static_cast<int>(pf_.size()))
        throw InfeasibleAssignment("TaInstance: fewer robots than targets");
}

const char* to_string(Method m) {
    switch (m) {
        case Method::exact: return "exact";
        case Method::approx: return "approx";
        case Method::brute: return "brute";
    }
    return "unknown";
}

std::vector<int> TaSolution::robots() const {
    std::vector<int> r(extra);
    for (int& v : r) ++v;
    return r;
}

double ta_objective(std::span<const double> pf, std::span<const int> extra) {
    double phi = 1.0;
    for (std::size_t j = 0; j < pf.size(); ++j) phi *= 1.0 - std::pow(pf[j], extra[j] + 1);
    return phi;
}

double relaxed_log_objective(std::span<const double> pf, std::span<const double> k) {
    double s = 0.0;
    for (std::size_t j = 0; j < pf.size(); ++j) s += std::log1p(-std::exp((k[j] + 1.0) * std::log(pf[j])));
    return s;
}

double k_of_lambda(double pf, double lambda) {
    const double L = std::log(pf);
    return -std::log1p(L / lambda) / L - 1.0;
}

double lambda_of_k(double pf, double k) {
    const double L = std::log(pf);
    const double e = (k + 1.0) * L;
    return std::exp(e) * L / -std::expm1(e);
}

namespace {

double sum_k(std::span<const double> pf, double lambda) {
    double s = 0.0;
    for (double p : pf) s += k_of_lambda(p, lambda);
    return s;
}

double sum_dk(std::span<const double> pf, double lambda) {
    double s = 0.0;
    for (double p : pf) s += 1.0 / (lambda * (lambda + std::log(p)));
    return s;
}

}  // namespace

RelaxedSolution solve_relaxed(std::span<const double> pf, double total) {
    if (pf.empty()) throw std::invalid_argument("solve_relaxed: no targets");
    if (!(total > -static_cast<double>(pf.size()))) throw std::invalid_argument("solve_relaxed: total must exceed -|T|");
    double max_abs_log = 0.0;
    for (double p : pf) {
        if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("solve_relaxed: PF must lie in (0,1)");
        max_abs_log = std::max(max_abs_log, -std::log(p));
    }

    // sum k is increasing in lambda; bisect on u = log(-lambda), where it is decreasing.
    double lambda_hi = -1e-18;
    while (sum_k(pf, lambda_hi) <= total) {
        lambda_hi *= 1e-6;
        if (lambda_hi > -1e-300) throw std::runtime_error("solve_relaxed: could not bracket lambda from above");
    }
    double scale = 1.0;
    double lambda_lo = -max_abs_log * scale;
    for (int i = 0; sum_k(pf, lambda_lo) >= total; ++i) {
        if (i > 2000) throw std::runtime_error("solve_relaxed: could not bracket lambda from below");
        scale *= 2.0;
        lambda_lo = -max_abs_log * scale;
    }

    RelaxedSolution out;
    double u_small = std::log(-lambda_hi), u_large = std::log(-lambda_lo);
    for (; out.iterations < 400; ++out.iterations) {
        const double mid = 0.5 * (u_small + u_large);
        if (mid <= u_small || mid >= u_large) break;
        if (sum_k(pf, -std::exp(mid)) > total)
            u_small = mid;
        else
            u_large = mid;
    }
    double lambda = -std::exp(0.5 * (u_small + u_large));
    // Polish with Newton steps on lambda while they improve the residual.
    for (int i = 0; i < 3; ++i) {
        const double r = sum_k(pf, lambda) - total;
        const double next = lambda - r / sum_dk(pf, lambda);
        if (!(next < 0.0) || std::abs(sum_k(pf, next) - total) >= std::abs(r)) break;
        lambda = next;
    }
    out.lambda_star = lambda;
    out.k_star.reserve(pf.size());
    for (double p : pf) out.k_star.push_back(k_of_lambda(p, lambda));
    double s = 0.0;
    for (double k : out.k_star) s += k;
    out.feasibility_residual = std::abs(s - total);
    return out;
}

RelaxedSolution solve_rta(const TaInstance& inst) {
    const int total = inst.team_size() - 2 * static_cast<int>(inst.n_targets());
    if (total < 0) throw std::invalid_argument("solve_rta: requires K >= 2|T|");
    return solve_relaxed(inst.pf(), static_cast<double>(total));
}

TaSolution round_rta(const TaInstance& inst, std::span<const double> k_star) {
    const std::size_t n = inst.n_targets();
    if (k_star.size() != n) throw std::invalid_argument("round_rta: k_star size mismatch");
    TaSolution sol;
    sol.method = Method::approx;
    sol.extra.resize(n);
    int used = 0;
    for (std::size_t j = 0; j < n; ++j) {
        // 1e-9 keeps values like 3 + 1e-14 from rounding up to 4.
        sol.extra[j] = std::max(0, static_cast<int>(std::ceil(k_star[j] - 1e-9)));
        used += sol.extra[j];
    }
    int remainder = inst.extra_robots() - used;
    if (remainder < 0) throw std::logic_error("round_rta: rounded relaxation exceeds the team size");
    const auto& pf = inst.pf();
    while (remainder-- > 0) {
        std::size_t best = 0;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            const double gain = std::log1p(-std::pow(pf[j], sol.extra[j] + 2)) - std::log1p(-std::pow(pf[j], sol.extra[j] + 1));
            if (gain > best_gain) {
                best_gain = gain;
                best = j;
            }
        }
        ++sol.extra[best];
    }
    sol.objective = ta_objective(pf, sol.extra);
    return sol;
}

TaSolution solve_ta_approx(const TaInstance& inst) {
    const auto relaxed = solve_rta(inst);
    return round_rta(inst, relaxed.k_star);
}

double allocation_count(int extra, std::size_t targets) {
    if (extra < 0 || targets == 0) return 0.0;
    // C(extra + targets - 1, targets - 1)
    double c = 1.0;
    for (std::size_t i = 1; i < targets; ++i) c = c * static_cast<double>(extra + static_cast<int>(i)) / static_cast<double>(i);
    return std::round(c);
}

TaSolution brute_force_ta(const TaInstance& inst) {
    const std::size_t n = inst.n_targets();
    const int R = inst.extra_robots();
    if (allocation_count(R, n) > kBruteForceLimit) throw std::invalid_argument("brute_force_ta: too many allocations");
    TaSolution best;
    best.method = Method::brute;
    best.objective = -1.0;
    std::vector<int> k(n, 0);
    // Lexicographic enumeration of (k_0..k_{n-2}); the last target takes the remainder.
    auto recurse = [&](auto&& self, std::size_t j, int left) -> void {
        if (j + 1 == n) {
            k[j] = left;
            const double v = ta_objective(inst.pf(), k);
            if (v > best.objective) {
                best.objective = v;
                best.extra = k;
            }
            return;
        }
        for (int c = 0; c <= left; ++c) {
            k[j] = c;
            self(self, j + 1, left - c);
        }
    };
    recurse(recurse, 0, R);
    return best;
}

TaSolution solve_ta_exact(const TaInstance& inst, std::size_t node_limit) {
    const std::size_t n = inst.n_targets();
    const auto& pf = inst.pf();
    const int R = inst.extra_robots();

    struct Node {
        double bound;
        std::size_t sequence;
        std::vector<int> fixed;
        double partial;  // log objective of the fixed prefix
        int left;
    };
    struct Order {
        bool operator()(const Node& a, const Node& b) const {
            if (a.bound != b.bound) return a.bound < b.bound;
            return a.sequence > b.sequence;
        }
    };

    auto log_term = [&](std::size_t j, int k) { return std::log1p(-std::pow(pf[j], k + 1)); };
    auto bound_of = [&](std::size_t depth, double partial, int left) {
        const std::span<const double> rest(pf.data() + depth, n - depth);
        if (rest.size() == 1) return partial + log_term(depth, left);
        const auto relaxed = solve_relaxed(rest, static_cast<double>(left));
        const double b = partial + relaxed_log_objective(rest, relaxed.k_star);
        // Slack for the bisection error: the relaxed optimum may be integral.
        return b + 1e-12 * (1.0 + std::abs(b));
    };

    std::priority_queue<Node, std::vector<Node>, Order> open;
    std::size_t sequence = 0;
    open.push(Node{bound_of(0, 0.0, R), sequence++, {}, 0.0, R});
    double incumbent = -std::numeric_limits<double>::infinity();
    std::vector<int> best;
    std::size_t expanded = 0;

    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (node.bound <= incumbent) break;
        if (++expanded > node_limit) throw std::runtime_error("solve_ta_exact: node limit exceeded");
        const std::size_t depth = node.fixed.size();
        if (depth + 1 == n) {
            // Only one target left: it takes the remainder.
            const double value = node.partial + log_term(depth, node.left);
            if (value > incumbent) {
                incumbent = value;
                best = node.fixed;
                best.push_back(node.left);
            }
            continue;
        }
        for (int c = 0; c <= node.left; ++c) {
            Node child;
            child.fixed = node.fixed;
            child.fixed.push_back(c);
            child.partial = node.partial + log_term(depth, c);
            child.left = node.left - c;
            child.bound = bound_of(depth + 1, child.partial, child.left);
            if (child.bound <= incumbent) continue;
            child.sequence = sequence++;
            open.push(std::move(child));
        }
    }
    if (n == 1) best = {R};
    TaSolution sol;
    sol.method = Method::exact;
    sol.extra = best;
    sol.objective = ta_objective(pf, sol.extra);
    return sol;
}

TaSolution solve_ta(const TaInstance& inst) {
    if (inst.team_size() >= 2 * static_cast<int>(inst.n_targets())) return solve_ta_approx(inst);
    return solve_ta_exact(inst);
}

Preprocessed preprocess(std::span<const double> pf, int team_size) {
    Preprocessed out;
    if (team_size < static_cast<int>(pf.size())) throw InfeasibleAssignment("fewer robots than targets");
    for (std::size_t j = 0; j < pf.size(); ++j) {
        if (!(pf[j] >= 0.0 && pf[j] <= 1.0)) throw std::invalid_argument("preprocess: PF outside [0,1]");
        if (pf[j] == 1.0) throw InfeasibleAssignment("target " + std::to_string(j) + " cannot be reached (PF = 1)");
        if (pf[j] == 0.0) {
            out.settled.push_back(j);
        } else {
            out.kept.push_back(j);
            out.reduced_pf.push_back(pf[j]);
        }
    }
    out.reduced_team = team_size - static_cast<int>(out.settled.size());
    return out;
}

std::vector<int> assign_robots(std::span<const double> pf, int team_size) {
    const Preprocessed pre = preprocess(pf, team_size);
    std::vector<int> robots(pf.size(), 0);
    for (std::size_t j : pre.settled) robots[j] = 1;
    if (pre.kept.empty()) {
        // Every target is certain; spare robots change nothing and go to the first one.
        if (!robots.empty()) robots[0] += pre.reduced_team;
        return robots;
    }
    const TaSolution sol = solve_ta(TaInstance(pre.reduced_pf, pre.reduced_team));
    for (std::size_t i = 0; i < pre.kept.size(); ++i) robots[pre.kept[i]] = sol.extra[i] + 1;
    return robots;
}

}  // namespace rcmdp::assign
