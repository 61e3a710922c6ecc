#pragma once

#include <string>

#include "spraygrid/registry.hpp"

namespace spraygrid {

// Performance-landscape scatter plot: x = model size (MB), y = excess at the
// report's primary target, marker area proportional to inference time
// (1 / relative_speed), color keyed by encoder group and marker shape by
// architecture. Palette and shape order follow first appearance in the
// report's sorted records, so identical registries yield byte-identical
// output.
std::string landscape_svg(const SweepReport& report);

// One CSV row per record with every plotted field.
std::string landscape_csv(const SweepReport& report);

} // namespace spraygrid
