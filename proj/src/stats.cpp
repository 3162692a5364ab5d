#include "tdmlmc/stats.hpp"

#include "tdmlmc/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace tdmlmc {

void Moments::add(double x)
{
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean_ += delta_n;
    m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ - 4.0 * delta_n * m3_;
    m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
    m2_ += term1;
}

void Moments::merge(const Moments& other)
{
    if (other.n_ == 0)
        return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    const double d2 = delta * delta;
    const double d3 = d2 * delta;
    const double d4 = d2 * d2;

    const double m2 = m2_ + other.m2_ + d2 * na * nb / n;
    const double m3 = m3_ + other.m3_ + d3 * na * nb * (na - nb) / (n * n)
        + 3.0 * delta * (na * other.m2_ - nb * m2_) / n;
    const double m4 = m4_ + other.m4_ + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
        + 6.0 * d2 * (na * na * other.m2_ + nb * nb * m2_) / (n * n) + 4.0 * delta * (na * other.m3_ - nb * m3_) / n;

    mean_ = (na * mean_ + nb * other.mean_) / n;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
    n_ += other.n_;
}

double Moments::variance() const
{
    return n_ < 2 ? 0.0 : std::max(0.0, m2_ / static_cast<double>(n_ - 1));
}

double Moments::population_variance() const
{
    return n_ == 0 ? 0.0 : std::max(0.0, m2_ / static_cast<double>(n_));
}

double Moments::fourth_central() const
{
    return n_ == 0 ? 0.0 : m4_ / static_cast<double>(n_);
}

double Moments::se_mean() const
{
    return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

double Moments::se_variance() const
{
    if (n_ < 2)
        return 0.0;
    const double v = population_variance();
    return std::sqrt(std::max(0.0, fourth_central() - v * v) / static_cast<double>(n_));
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw InputError("fit_line: need at least two (x, y) pairs of equal length");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = x[k] - mx;
        const double dy = y[k] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0)
        throw InputError("fit_line: x values are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

std::vector<double> isotonic_nonincreasing(std::span<const double> values)
{
    struct Block {
        double sum;
        std::size_t size;
        double mean() const { return sum / static_cast<double>(size); }
    };
    std::vector<Block> blocks;
    blocks.reserve(values.size());
    for (double v : values) {
        blocks.push_back({v, 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() < blocks.back().mean()) {
            Block top = blocks.back();
            blocks.pop_back();
            blocks.back().sum += top.sum;
            blocks.back().size += top.size;
        }
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (const Block& b : blocks)
        out.insert(out.end(), b.size, b.mean());
    return out;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body)
{
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t k = 0; k < count; ++k)
            body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t k = next.fetch_add(1); k < count; k = next.fetch_add(1)) {
                try {
                    body(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next.store(count);
                }
            }
        });
    }
    for (std::thread& th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace tdmlmc
