#pragma once

#include <span>
#include <vector>

namespace ftecdi {

/// Dead volume between the cell exit and the conductivity sensor: an ideal
/// mixing tank followed by a pure plug-flow delay.
struct DownstreamParams {
    double t_mix = 60.0;  // s, tank volume / flow rate
    double t_plug = 15.0; // s
};

namespace downstream {

/// Stirred tank t_mix dc/dt = u - c, integrated exactly for input that is
/// linear between samples. Output shares the input's time base; c0 is the
/// tank content at times.front(). Throws ConfigError unless times are strictly
/// increasing.
std::vector<double> mixing_tank(std::span<const double> times, std::span<const double> input,
                                double t_mix, double c0);

/// output(t) = input(t - t_plug), linearly interpolated, and c0 while
/// t - t_plug precedes the first sample.
std::vector<double> plug_delay(std::span<const double> times, std::span<const double> input,
                               double t_plug, double c0);

/// Tank then delay.
std::vector<double> sensed(std::span<const double> times, std::span<const double> input,
                           const DownstreamParams& params, double c0);

} // namespace downstream
} // namespace ftecdi
