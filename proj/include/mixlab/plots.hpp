#pragma once

#include <string>

#include "mixlab/csv.hpp"

namespace mixlab {

// Every renderer takes the parsed CSV that sits next to the SVG it produces,
// and every number shown in the SVG is one of that CSV's values re-formatted
// through the shared shortest-round-trip formatter. Colors follow the
// improved-blue / degraded-red convention.

// Input: per_class.csv (class_index, recall_vanilla, recall_treated,
// delta_pp, confidence_delta, group). Bars sorted descending by delta_pp.
std::string render_delta_bar_chart(const CsvTable& per_class, const std::string& title);

// Confidence change (x) against recall change (y), one dot per class.
std::string render_confidence_scatter(const CsvTable& per_class, const std::string& title);

// Input: recall_band.csv (rank, class_index, delta_mean, delta_min,
// delta_max). Mean line over a min/max band across seeds.
std::string render_recall_band(const CsvTable& band, const std::string& title);

// Input: sweep.csv (rate, acc_mean, acc_std, n_dc, mean_delta_dc,
// std_delta_dc). Three panels: accuracy with seed-std shading, the count of
// degraded classes, and their mean recall change with across-class shading.
std::string render_sweep_panels(const CsvTable& sweep, const std::string& title);

// Input: labelinfo.csv (strength, then one column per class named
// class<idx>_<group>). One curve per class; degraded/fragile in red.
std::string render_label_info(const CsvTable& curves, const std::string& title);

}  // namespace mixlab
