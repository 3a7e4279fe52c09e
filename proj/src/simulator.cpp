#include "rcmdp/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace rcmdp::sim {

const char* to_string(EpsMode mode) {
    switch (mode) {
        case EpsMode::nominal: return "nominal";
        case EpsMode::worst_case: return "worst_case";
        case EpsMode::sampled: return "sampled";
    }
    return "unknown";
}

EpsMode parse_eps_mode(const std::string& text) {
    if (text == "nominal") return EpsMode::nominal;
    if (text == "worst_case" || text == "worst-case") return EpsMode::worst_case;
    if (text == "sampled") return EpsMode::sampled;
    throw std::invalid_argument("unknown eps mode '" + text + "'");
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

class NeumaierSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(std::span<const double> xs) {
    MeanStd out;
    if (xs.empty()) return out;
    NeumaierSum s;
    for (double x : xs) s.add(x);
    out.mean = s.value() / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        NeumaierSum sq;
        for (double x : xs) sq.add((x - out.mean) * (x - out.mean));
        out.std = std::sqrt(sq.value() / static_cast<double>(xs.size() - 1));
    }
    return out;
}

SimStats summarize(std::span<const char> success, std::span<const double> duration) {
    SimStats st;
    st.n_trials = success.size();
    std::vector<double> succ_dur;
    for (std::size_t i = 0; i < success.size(); ++i)
        if (success[i]) succ_dur.push_back(duration[i]);
    st.n_success = succ_dur.size();
    if (st.n_trials == 0) return st;
    const double n = static_cast<double>(st.n_trials);
    const double p = static_cast<double>(st.n_success) / n;
    st.empirical_success_prob = p;
    st.success_standard_error = std::sqrt(p * (1.0 - p) / n);
    const auto all = mean_std(duration);
    st.mean_duration = all.mean;
    st.std_duration = all.std;
    if (!succ_dur.empty()) {
        const auto cond = mean_std(succ_dur);
        st.mean_duration_given_success = cond.mean;
        st.std_duration_given_success = cond.std;
    }
    return st;
}

void set_theory(SimStats& st, double theoretical_success) {
    const double emp_fail = 1.0 - st.empirical_success_prob;
    const double th_fail = 1.0 - theoretical_success;
    if (th_fail > 0.0) st.convergence_error = std::abs(emp_fail - th_fail) / th_fail;
    st.kl_divergence = kl_divergence(st.empirical_success_prob, theoretical_success);
}

// Runs body(i) for i in [0, n) on `threads` workers with a static block split.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n / 256, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void check_plan(const RobotPlan& plan, EpsMode mode) {
    if (!plan.model || !plan.policy) throw std::invalid_argument("run_single: plan needs a model and a policy");
    const CmdpModel& m = *plan.model;
    if (!m.pairs().contains(plan.sink_pair)) throw std::invalid_argument("run_single: sink pair is not a non-absorbing pair");
    if (plan.policy->n_states() != m.n_states()) throw std::invalid_argument("run_single: policy size mismatch");
    for (StateId x : m.transient_states()) {
        const auto probs = plan.policy->at(x);
        if (probs.size() != m.actions(x).size()) throw std::invalid_argument("run_single: policy action count mismatch");
        double s = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0)) throw std::invalid_argument("run_single: negative policy mass");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("run_single: policy mass does not sum to one");
    }
    if (mode == EpsMode::worst_case && (!plan.eps_star || plan.eps_star->size() != m.pairs().size()))
        throw std::invalid_argument("run_single: worst_case mode needs eps_star");
    if (mode == EpsMode::sampled && (!plan.uncertainty || plan.uncertainty->eps_bar.size() != m.pairs().size()))
        throw std::invalid_argument("run_single: sampled mode needs the uncertainty set");
    if (!check_transience(m)) throw std::invalid_argument("run_single: model is not transient; rollouts could loop forever");
}

std::size_t draw(std::span<const double> weights, double u) {
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        acc += weights[k];
        if (u < acc) return k;
    }
    // Rounding left u above the last partial sum: take the last positive entry.
    for (std::size_t k = weights.size(); k-- > 0;)
        if (weights[k] > 0.0) return k;
    return 0;
}

std::size_t draw_transition(std::span<const Transition> row, double u) {
    double acc = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
        acc += row[k].probability;
        if (u < acc) return k;
    }
    for (std::size_t k = row.size(); k-- > 0;)
        if (row[k].probability > 0.0) return k;
    return 0;
}

TrialResult rollout(const RobotPlan& plan, EpsMode mode, std::uint64_t key, bool keep_path, std::size_t max_steps,
                    std::size_t max_rejections) {
    const CmdpModel& m = *plan.model;
    const StateActionIndex& idx = m.pairs();
    CounterRng rng(key);
    StateActionTable<double> sampled;
    if (mode == EpsMode::sampled) sampled = sample_uncertainty(*plan.uncertainty, rng, max_rejections);

    StateId x = draw(m.beta(), rng.uniform());
    TrialResult tr;
    NeumaierSum duration;
    for (std::size_t step = 0;; ++step) {
        if (m.is_absorbing(x)) {
            tr.success = true;
            break;
        }
        if (step >= max_steps) throw std::runtime_error("rollout: step limit exceeded");
        const ActionId a = draw(plan.policy->at(x), rng.uniform());
        const Action& act = m.action(x, a);
        const std::size_t k = idx.index(x, a);
        double t = act.constraint_costs.empty() ? 0.0 : act.constraint_costs[0];
        if (mode == EpsMode::worst_case) t += (*plan.eps_star)[k];
        if (mode == EpsMode::sampled) t += sampled[k];
        duration.add(t);
        if (keep_path) tr.path.push_back({x, a});
        if (x == plan.sink_pair.state) {
            // Entered through a failure; the sink action only closes the trial.
            tr.success = false;
            break;
        }
        x = act.transitions[draw_transition(act.transitions, rng.uniform())].to;
        if (x == plan.sink_pair.state) {
            if (keep_path) tr.path.push_back(plan.sink_pair);
            tr.success = false;
            break;
        }
    }
    tr.duration = duration.value();
    return tr;
}

}  // namespace

StateActionTable<double> sample_uncertainty(const UncertaintySet& u, CounterRng& rng, std::size_t max_attempts) {
    StateActionTable<double> eps(u.eps_bar.index_ptr(), 0.0);
    std::vector<std::size_t> free;
    double log_box = 0.0, total = 0.0;
    for (std::size_t k = 0; k < u.eps_bar.size(); ++k)
        if (u.eps_bar[k] > 0.0) {
            free.push_back(k);
            log_box += std::log(u.eps_bar[k]);
            total += u.eps_bar[k];
        }
    if (free.empty() || u.gamma <= 0.0) return eps;
    const double m = static_cast<double>(free.size());
    const double log_simplex = m * std::log(u.gamma) - std::lgamma(m + 1.0);
    const bool box_proposal = u.gamma >= total || log_box <= log_simplex;

    std::vector<double> e(free.size() + 1);
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        bool ok = true;
        if (box_proposal) {
            double s = 0.0;
            for (std::size_t j = 0; j < free.size(); ++j) {
                e[j] = u.eps_bar[free[j]] * rng.uniform();
                s += e[j];
            }
            ok = s <= u.gamma;
        } else {
            // First |free| coordinates of a flat Dirichlet are uniform on the corner simplex.
            double s = 0.0;
            for (double& v : e) {
                v = -std::log1p(-rng.uniform());
                s += v;
            }
            for (std::size_t j = 0; j < free.size(); ++j) {
                e[j] = u.gamma * e[j] / s;
                if (e[j] > u.eps_bar[free[j]]) ok = false;
            }
        }
        if (ok) {
            for (std::size_t j = 0; j < free.size(); ++j) eps[free[j]] = e[j];
            return eps;
        }
    }
    throw std::runtime_error("sample_uncertainty: rejection sampling did not accept within " +
                             std::to_string(max_attempts) + " attempts");
}

SingleRun run_single(const RobotPlan& plan, const SingleRunOptions& options) {
    check_plan(plan, options.eps_mode);
    SingleRun out;
    out.trials.resize(options.n_trials);
    parallel_for(options.n_trials, options.threads, [&](std::size_t i) {
        out.trials[i] = rollout(plan, options.eps_mode, substream_key(options.seed, i), options.keep_paths, options.max_steps,
                                options.max_rejections);
    });
    std::vector<char> success(options.n_trials);
    std::vector<double> duration(options.n_trials);
    for (std::size_t i = 0; i < options.n_trials; ++i) {
        success[i] = out.trials[i].success;
        duration[i] = out.trials[i].duration;
    }
    out.stats = summarize(success, duration);
    if (options.theoretical_pf) set_theory(out.stats, 1.0 - *options.theoretical_pf);
    return out;
}

double kl_divergence(double p_empirical, double p_theory) {
    const double lo = 1e-12, hi = 1.0 - 1e-12;
    const double p = std::clamp(p_empirical, lo, hi);
    const double q = std::clamp(p_theory, lo, hi);
    return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

namespace {

struct TeamTrial {
    bool success = false;
    double duration = 0.0;
};

TeamTrial team_trial(std::span<const RobotPlan> plans, std::span<const int> counts, EpsMode mode, std::uint64_t trial_key,
                     std::size_t max_rejections) {
    std::uint64_t robot = 0;
    TeamTrial out{true, 0.0};
    for (std::size_t j = 0; j < plans.size(); ++j) {
        bool reached = false;
        for (int r = 0; r < counts[j]; ++r) {
            const auto tr = rollout(plans[j], mode, substream_key(trial_key, robot++), false, 10'000'000, max_rejections);
            reached = reached || tr.success;
            out.duration = std::max(out.duration, tr.duration);
        }
        out.success = out.success && reached;
    }
    return out;
}

template <class CountsOf>
SimStats run_team_impl(std::span<const RobotPlan> plans, const TeamRunOptions& options, CountsOf counts_of) {
    for (const auto& plan : plans) check_plan(plan, options.eps_mode);
    std::vector<char> success(options.n_trials);
    std::vector<double> duration(options.n_trials);
    parallel_for(options.n_trials, 0, [&](std::size_t i) {
        const std::uint64_t key = substream_key(options.seed, i);
        const std::vector<int> counts = counts_of(key);
        const auto t = team_trial(plans, counts, options.eps_mode, key, options.max_rejections);
        success[i] = t.success;
        duration[i] = t.duration;
    });
    SimStats st = summarize(success, duration);
    if (options.theoretical_success) set_theory(st, *options.theoretical_success);
    return st;
}

}  // namespace

SimStats run_team(std::span<const RobotPlan> plans, std::span<const int> robots_per_target, const TeamRunOptions& options) {
    if (plans.size() != robots_per_target.size()) throw std::invalid_argument("run_team: one plan per target required");
    for (int c : robots_per_target)
        if (c < 0) throw std::invalid_argument("run_team: negative robot count");
    const std::vector<int> counts(robots_per_target.begin(), robots_per_target.end());
    return run_team_impl(plans, options, [&](std::uint64_t) { return counts; });
}

SimStats run_team_uniform(std::span<const RobotPlan> plans, int team_size, const TeamRunOptions& options) {
    if (plans.empty()) throw std::invalid_argument("run_team_uniform: no targets");
    if (team_size < 0) throw std::invalid_argument("run_team_uniform: negative team size");
    return run_team_impl(plans, options, [&](std::uint64_t key) {
        CounterRng rng(substream_key(key, ~std::uint64_t{0}));
        std::vector<int> counts(plans.size(), 0);
        for (int r = 0; r < team_size; ++r) ++counts[rng.below(plans.size())];
        return counts;
    });
}

void write_trials_csv(std::ostream& out, std::span<const TrialResult> trials) {
    out << "trial,success,duration\n";
    for (std::size_t i = 0; i < trials.size(); ++i)
        out << i << ',' << (trials[i].success ? 1 : 0) << ',' << format_number(trials[i].duration) << '\n';
}

}  // namespace rcmdp::sim
