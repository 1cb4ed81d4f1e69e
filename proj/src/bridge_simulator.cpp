#include "abstop/bridge_simulator.hpp"

#include "abstop/error.hpp"
#include "abstop/parallel.hpp"

#include <cmath>
#include <numbers>

namespace abstop {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

// 53-bit uniform in (0, 1].
double unit_interval(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

struct StepTable {
    std::vector<double> t;
    std::vector<double> decay;
    std::vector<double> sd;
    std::vector<double> barrier;
};

StepTable make_step_table(const PathConfig& config, double B) {
    StepTable table;
    table.t = time_grid(config.n_steps, config.grid);
    const std::size_t n = table.t.size();
    table.decay.resize(n);
    table.sd.resize(n);
    table.barrier.resize(n);
    for (std::size_t k = 1; k < n; ++k) {
        table.decay[k] = transition_decay(table.t[k - 1], table.t[k], config.alpha);
        table.sd[k] = std::sqrt(transition_variance(table.t[k - 1], table.t[k], config.alpha));
        table.barrier[k] = B * std::sqrt(1.0 - table.t[k]);
    }
    return table;
}

} // namespace

std::vector<double> time_grid(std::size_t n_steps, GridKind kind) {
    if (n_steps < 2) {
        throw Error(ErrorKind::domain, "time_grid: requires n_steps >= 2");
    }
    std::vector<double> grid(n_steps + 1);
    const double n = static_cast<double>(n_steps);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double u = static_cast<double>(k) / n;
        grid[k] = kind == GridKind::uniform ? u : 1.0 - (1.0 - u) * (1.0 - u);
    }
    grid.front() = 0.0;
    grid.back() = 1.0;
    return grid;
}

double transition_decay(double t, double t_next, double alpha) {
    if (alpha == 0.0) {
        return 1.0;
    }
    if (t_next == 1.0) {
        return 0.0;
    }
    return std::pow((1.0 - t_next) / (1.0 - t), alpha);
}

double transition_variance(double t, double t_next, double alpha) {
    if (alpha == 0.0) {
        return t_next - t;
    }
    if (t_next == 1.0) {
        return 0.0;
    }
    // integral_t^t' ((1 - t') / (1 - s))^(2 alpha) ds = (1 - t') (1 - r^(2 alpha - 1)) / (2 alpha - 1),
    // r = (1 - t') / (1 - t); the alpha = 1/2 limit is (1 - t') ln(1 / r).
    const double log_r = std::log((1.0 - t_next) / (1.0 - t));
    const double slope = 2.0 * alpha - 1.0;
    if (slope == 0.0) {
        return -(1.0 - t_next) * log_r;
    }
    return -(1.0 - t_next) * std::expm1(slope * log_r) / slope;
}

double step_exact(double x, double t, double t_next, double noise, double alpha) {
    if (!(t >= 0.0 && t < t_next && t_next <= 1.0)) {
        throw Error(ErrorKind::domain, "step_exact: requires 0 <= t < t_next <= 1");
    }
    if (alpha < 0.0) {
        throw Error(ErrorKind::domain, "step_exact: requires alpha >= 0");
    }
    return transition_decay(t, t_next, alpha) * x + std::sqrt(transition_variance(t, t_next, alpha)) * noise;
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
        ctr = {hi32(p1) ^ ctr[1] ^ key[0], lo32(p1), hi32(p0) ^ ctr[3] ^ key[1], lo32(p0)};
    }
    return ctr;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t path_index)
    : key_{lo32(seed), hi32(seed)}, path_(path_index) {}

double NormalStream::operator()() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const auto bits = philox4x32({lo32(block_), hi32(block_), lo32(path_), hi32(path_)}, key_);
    ++block_;
    // Box-Muller on two 53-bit uniforms.
    const double radius = std::sqrt(-2.0 * std::log(unit_interval(bits[0], bits[1])));
    const double angle = 2.0 * std::numbers::pi * unit_interval(bits[2], bits[3]);
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::vector<PathPoint> simulate_path(const PathConfig& config, std::uint64_t path_index) {
    NormalStream noise(config.seed, path_index);
    return simulate_path(config, noise);
}

PathPoint first_crossing(std::span<const PathPoint> path, double B) {
    if (path.empty()) {
        throw Error(ErrorKind::domain, "first_crossing: empty path");
    }
    for (const PathPoint& p : path) {
        if (p.x >= B * std::sqrt(1.0 - p.t)) {
            return p;
        }
    }
    return path.back();
}

double stopped_payoff(std::span<const PathPoint> path, double B) { return first_crossing(path, B).x; }

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double sum = 0.0;
        for (double v : values) {
            sum += v;
        }
        return sum;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

McEstimate estimate_value(const PathConfig& config, double B, std::size_t n_paths, double analytic_v,
                          unsigned workers) {
    if (n_paths < 100) {
        throw Error(ErrorKind::domain, "estimate_value: requires n_paths >= 100");
    }
    if (config.alpha < 0.0) {
        throw Error(ErrorKind::domain, "estimate_value: requires alpha >= 0");
    }
    const StepTable table = make_step_table(config, B);
    const std::size_t n = table.t.size();
    std::vector<double> payoff(n_paths);
    std::vector<double> stop_time(n_paths);

    parallel_for(n_paths, workers == 0 ? worker_count() : workers, [&](std::size_t i) {
        NormalStream noise(config.seed, i);
        double x = 0.0;
        double tau = 1.0;
        for (std::size_t k = 1; k < n; ++k) {
            x = table.decay[k] * x + table.sd[k] * noise();
            if (x >= table.barrier[k]) {
                tau = table.t[k];
                break;
            }
        }
        payoff[i] = x;
        stop_time[i] = tau;
    });

    const double count = static_cast<double>(n_paths);
    McEstimate out;
    out.n_paths = n_paths;
    out.analytic_v = analytic_v;
    out.mean = pairwise_sum(payoff) / count;
    std::vector<double> sq(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) {
        const double d = payoff[i] - out.mean;
        sq[i] = d * d;
    }
    out.std_error = std::sqrt(pairwise_sum(sq) / (count - 1.0) / count);
    out.z_score = out.std_error > 0.0 ? (out.mean - analytic_v) / out.std_error : 0.0;
    out.mean_stop_time = pairwise_sum(stop_time) / count;
    return out;
}

} // namespace abstop
