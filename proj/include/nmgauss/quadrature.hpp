#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "nmgauss/errors.hpp"

namespace nmgauss {

// Gauss-Legendre rule scaled to the unit cell [-1/2, 1/2]:
// integral f = sum_j weights[j] * f(nodes[j]) for the unit interval.
struct GLRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Nodes via Newton iteration on P_n with the three-term recurrence; standard
// construction, accurate to machine precision for the orders used here.
inline GLRule gl_rule(int n) {
    if (n < 1) throw InvalidParameter("gl_rule: order must be >= 1");
    GLRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                // one polishing step after convergence
                p0 = 1.0;
                p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                x -= p1 / dp;
                break;
            }
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // scale [-1,1] -> [-1/2,1/2]
        rule.nodes[static_cast<std::size_t>(i)] = -0.5 * x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * x;
        rule.weights[static_cast<std::size_t>(i)] = 0.5 * w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

inline const GLRule& gl_cached(int n) {
    static std::map<int, GLRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gl_rule(n)).first;
    return it->second;
}

} // namespace nmgauss
