#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "core_types.hpp"

namespace ripstream::plot {

// Infinite bars always pass the filter.
inline std::vector<Interval> filter_by_length(const std::vector<Interval>& intervals, double min_length) {
  std::vector<Interval> out;
  for (const auto& iv : intervals)
    if (iv.is_infinite() || iv.length() >= min_length) out.push_back(iv);
  std::stable_sort(out.begin(), out.end(), interval_less);
  return out;
}

// Right end of the finite axis: the largest finite value, padded by 5%.
inline double axis_extent(const std::vector<Interval>& intervals) {
  double hi = 0.0;
  for (const auto& iv : intervals) {
    hi = std::max(hi, iv.birth);
    if (!iv.is_infinite()) hi = std::max(hi, iv.death);
  }
  return hi > 0 ? hi * 1.05 : 1.0;
}

// One line per interval, "dim birth death", followed by a bar of '=' drawn
// over a `columns`-wide track. Infinite bars end in '>'.
inline std::string render_text(const std::vector<Interval>& intervals, std::size_t columns) {
  std::ostringstream out;
  if (intervals.empty()) return {};
  const double extent = axis_extent(intervals);
  std::vector<std::string> labels;
  std::size_t label_width = 0;
  for (const auto& iv : intervals) {
    labels.push_back(std::to_string(iv.dimension) + " " + format_exact(iv.birth) + " " + format_exact(iv.death));
    label_width = std::max(label_width, labels.back().size());
  }
  const std::size_t track = columns > label_width + 13 ? columns - label_width - 3 : 10;
  auto column_of = [&](double x) {
    return std::min<std::size_t>(track - 1, static_cast<std::size_t>(std::floor(x / extent * static_cast<double>(track))));
  };
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    std::string bar(track, ' ');
    const auto from = column_of(iv.birth);
    const auto to = iv.is_infinite() ? track - 1 : std::max(from, column_of(iv.death));
    for (auto c = from; c <= to; ++c) bar[c] = '=';
    if (iv.is_infinite()) bar[track - 1] = '>';
    out << labels[i] << std::string(label_width - labels[i].size(), ' ') << " |" << bar << "|\n";
  }
  return out.str();
}

// Horizontal bars grouped by degree. Each bar carries data-dim/data-birth/
// data-death attributes with the exact values it was drawn from.
inline std::string render_svg(const std::vector<Interval>& intervals) {
  constexpr double kWidth = 800, kLeft = 60, kRight = 40, kTop = 30, kRow = 10, kGap = 6, kGroupGap = 24;
  const double track = kWidth - kLeft - kRight;
  const double extent = axis_extent(intervals);

  std::ostringstream body;
  double y = kTop;
  int current_dim = -1;
  for (const auto& iv : intervals) {
    if (iv.dimension != current_dim) {
      if (current_dim != -1) y += kGroupGap;
      current_dim = iv.dimension;
      body << "  <text class=\"label\" x=\"8\" y=\"" << y + kRow << "\" font-size=\"12\">H" << iv.dimension
           << "</text>\n";
    }
    const double x0 = kLeft + iv.birth / extent * track;
    const double x1 = iv.is_infinite() ? kLeft + track : kLeft + iv.death / extent * track;
    body << "  <rect class=\"bar\" data-dim=\"" << iv.dimension << "\" data-birth=\"" << format_exact(iv.birth)
         << "\" data-death=\"" << format_exact(iv.death) << "\" x=\"" << x0 << "\" y=\"" << y << "\" width=\""
         << std::max(x1 - x0, 0.5) << "\" height=\"" << kRow << "\" fill=\"#3465a4\"/>\n";
    if (iv.is_infinite())
      body << "  <polygon class=\"arrow\" points=\"" << x1 << ',' << y - 2 << ' ' << x1 + 12 << ',' << y + kRow / 2
           << ' ' << x1 << ',' << y + kRow + 2 << "\" fill=\"#3465a4\"/>\n";
    y += kRow + kGap;
  }
  const double height = y + kTop;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << kWidth << ' ' << height << "\">\n"
      << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "  <line class=\"axis\" x1=\"" << kLeft << "\" y1=\"" << height - kTop / 2 << "\" x2=\"" << kLeft + track
      << "\" y2=\"" << height - kTop / 2 << "\" stroke=\"black\"/>\n"
      << "  <text x=\"" << kLeft << "\" y=\"" << height - 2 << "\" font-size=\"10\">0</text>\n"
      << "  <text x=\"" << kLeft + track - 30 << "\" y=\"" << height - 2 << "\" font-size=\"10\">"
      << format_exact(extent) << "</text>\n"
      << body.str() << "</svg>\n";
  return svg.str();
}

}  // namespace ripstream::plot
