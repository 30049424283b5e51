#include "ftecdi/downstream.hpp"

#include "ftecdi/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ftecdi::downstream {

namespace {

void check_series(std::span<const double> times, std::span<const double> input)
{
    if (times.size() != input.size()) {
        throw ConfigError("time and value series differ in length");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw ConfigError("time base must be strictly increasing");
        }
    }
}

} // namespace

std::vector<double> mixing_tank(std::span<const double> times, std::span<const double> input,
                                double t_mix, double c0)
{
    check_series(times, input);
    if (!(t_mix >= 0.0)) {
        throw ConfigError("mixing time must be non-negative");
    }
    if (t_mix == 0.0) {
        return {input.begin(), input.end()};
    }
    std::vector<double> out(input.size());
    if (out.empty()) {
        return out;
    }
    out[0] = c0;
    for (std::size_t i = 1; i < input.size(); ++i) {
        const double h = times[i] - times[i - 1];
        const double slope = (input[i] - input[i - 1]) / h;
        const double decay = std::exp(-h / t_mix);
        // Exact solution for u(t) = u0 + slope (t - t0).
        out[i] = input[i] - slope * t_mix + (out[i - 1] - input[i - 1] + slope * t_mix) * decay;
    }
    return out;
}

std::vector<double> plug_delay(std::span<const double> times, std::span<const double> input,
                               double t_plug, double c0)
{
    check_series(times, input);
    if (!(t_plug >= 0.0)) {
        throw ConfigError("plug delay must be non-negative");
    }
    if (t_plug == 0.0) {
        return {input.begin(), input.end()};
    }
    std::vector<double> out(input.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double source = times[i] - t_plug;
        if (source < times.front()) {
            out[i] = c0;
            continue;
        }
        while (j + 1 < times.size() && times[j + 1] <= source) {
            ++j;
        }
        if (times[j] == source || j + 1 == times.size()) {
            out[i] = input[j];
        } else {
            const double w = (source - times[j]) / (times[j + 1] - times[j]);
            out[i] = input[j] + w * (input[j + 1] - input[j]);
        }
    }
    return out;
}

std::vector<double> sensed(std::span<const double> times, std::span<const double> input,
                           const DownstreamParams& params, double c0)
{
    const auto mixed = mixing_tank(times, input, params.t_mix, c0);
    return plug_delay(times, mixed, params.t_plug, c0);
}

} // namespace ftecdi::downstream
