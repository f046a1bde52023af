#pragma once

#include <string>

#include "rgp/metrics.hpp"

namespace rgp::svg {

/// Deterministic standalone SVG of a ROC curve: unit box, chance
/// diagonal, the curve, axis ticks, and a caption. No timestamps or
/// other run-varying content, so reruns are byte-identical.
std::string render_roc(const metrics::RocCurve& curve, const std::string& title);

void write_roc(const metrics::RocCurve& curve, const std::string& title,
               const std::string& path);

} // namespace rgp::svg
