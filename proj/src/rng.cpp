#include "tdmlmc/rng.hpp"

namespace tdmlmc {

namespace {

constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t root_key(std::uint64_t seed) { return mix64(mix64(seed ^ 0x6A09E667F3BCC909ull) + golden_gamma); }

std::uint64_t child_key(std::uint64_t parent, std::uint64_t label)
{
    return mix64(parent ^ mix64(label + 0xBB67AE8584CAA73Bull)) + 0x3C6EF372FE94F82Bull;
}

} // namespace

UniformStream::UniformStream(std::uint64_t seed) : seed_(seed), key_(root_key(seed)) {}

UniformStream::UniformStream(std::uint64_t seed, std::vector<std::uint64_t> path, std::uint64_t key)
    : seed_(seed), path_(std::move(path)), key_(key)
{
}

UniformStream UniformStream::fork(std::uint64_t label) const
{
    std::vector<std::uint64_t> path = path_;
    path.push_back(label);
    return UniformStream(seed_, std::move(path), child_key(key_, label));
}

double UniformStream::next()
{
    ++counter_;
    const std::uint64_t bits = mix64(key_ + counter_ * golden_gamma);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

void UniformStream::draw(std::span<double> out)
{
    for (double& x : out)
        x = next();
}

std::vector<double> UniformStream::draw(std::size_t n)
{
    std::vector<double> out(n);
    draw(out);
    return out;
}

} // namespace tdmlmc
