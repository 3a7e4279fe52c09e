#include "rcmdp/deployment.hpp"
#include "rcmdp/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

namespace rcmdp::deploy {

DeploymentMap generate_map(const MapGeneratorConfig& cfg) {
    if (cfg.n_vertices < 2) throw std::invalid_argument("generate_map: need at least two vertices");
    if (cfg.n_targets < 1 || cfg.n_targets >= cfg.n_vertices)
        throw std::invalid_argument("generate_map: need 1 <= targets < vertices");
    if (!(cfg.t_min_low >= 0.0 && cfg.t_min_high >= cfg.t_min_low && cfg.gap_low > 0.0 && cfg.gap_high >= cfg.gap_low))
        throw std::invalid_argument("generate_map: invalid time ranges");

    CounterRng rng(substream_key(cfg.seed, 0x6d6170));
    const std::size_t n = cfg.n_vertices;
    std::vector<double> px(n), py(n);
    for (std::size_t i = 0; i < n; ++i) {
        px[i] = rng.uniform();
        py[i] = rng.uniform();
    }
    auto dist = [&](std::size_t a, std::size_t b) { return std::hypot(px[a] - px[b], py[a] - py[b]); };

    std::set<std::pair<std::size_t, std::size_t>> edge_set;
    std::vector<std::pair<std::size_t, std::size_t>> edge_list;
    auto add_edge = [&](std::size_t a, std::size_t b) {
        const auto key = std::minmax(a, b);
        if (a == b || edge_set.count(key)) return false;
        edge_set.insert(key);
        edge_list.emplace_back(key.first, key.second);
        return true;
    };
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < i; ++j)
            if (dist(i, j) < dist(i, best)) best = j;
        add_edge(best, i);
    }
    const auto extra = static_cast<std::size_t>(std::llround(cfg.extra_edge_fraction * static_cast<double>(n - 1)));
    for (std::size_t e = 0; e < extra; ++e) {
        const std::size_t i = rng.below(n);
        long best = -1;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || edge_set.count(std::minmax(i, j))) continue;
            if (best < 0 || dist(i, j) < dist(i, static_cast<std::size_t>(best))) best = static_cast<long>(j);
        }
        if (best >= 0) add_edge(i, static_cast<std::size_t>(best));
    }

    DeploymentMap map;
    map.vertices.resize(n);
    std::iota(map.vertices.begin(), map.vertices.end(), VertexId{0});
    map.start = 0;
    for (auto [a, b] : edge_list) {
        Edge e;
        e.u = static_cast<VertexId>(a);
        e.v = static_cast<VertexId>(b);
        e.t_min = rng.uniform(cfg.t_min_low, cfg.t_min_high);
        e.t_max = e.t_min + rng.uniform(cfg.gap_low, cfg.gap_high);
        map.edges.push_back(e);
    }

    std::vector<std::vector<std::size_t>> adj(n);
    for (auto [a, b] : edge_list) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<long> hops(n, -1);
    std::queue<std::size_t> q;
    hops[0] = 0;
    q.push(0);
    while (!q.empty()) {
        const auto x = q.front();
        q.pop();
        for (auto y : adj[x])
            if (hops[y] < 0) {
                hops[y] = hops[x] + 1;
                q.push(y);
            }
    }
    std::vector<std::size_t> order(n - 1);
    std::iota(order.begin(), order.end(), std::size_t{1});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return hops[a] > hops[b]; });
    for (std::size_t k = 0; k < cfg.n_targets; ++k) map.targets.push_back(static_cast<VertexId>(order[k]));
    std::sort(map.targets.begin(), map.targets.end());

    map.delta = cfg.delta > 0.0 ? cfg.delta : 0.5 * (cfg.gap_low + cfg.gap_high) / 7.0;
    map.eps_factor = cfg.eps_factor;
    map.seed = cfg.seed;
    validate_map(map);
    return map;
}

}  // namespace rcmdp::deploy
