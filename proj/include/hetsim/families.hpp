#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "hetsim/ir.hpp"
#include "hetsim/metrics.hpp"

namespace hetsim::families {

enum class Family { F1, F2, F3, F4, F5, Unclassified };

inline constexpr std::array<Family, 5> kFamilies = {Family::F1, Family::F2, Family::F3, Family::F4,
                                                    Family::F5};

std::string_view to_string(Family f);
std::optional<Family> parse_family(std::string_view text);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

// The defining cluster of a family: parameter footprint (bytes), parameter
// reuse (MAC/byte) and MAC count.
struct FamilyRanges {
  Range param_bytes;
  Range param_reuse;
  Range macs;
};

// Ranges are widened by this fraction at each edge before matching, except
// the F3 reuse ceiling.
inline constexpr double kBoundarySlack = 0.10;

// "Minimal" parameter reuse for F3, in MAC/byte.
inline constexpr double kMinimalReuse = 8.0;

FamilyRanges nominal_ranges(Family f);
FamilyRanges matching_ranges(Family f);

bool matches(Family f, const metrics::LayerMetrics& m);

// Pure function of (metrics, kind). Parameter-free stages are Unclassified.
Family classify(const metrics::LayerMetrics& m, ir::LayerKind kind);

// Family whose widened box is closest in log space over the three metrics.
Family nearest_family(const metrics::LayerMetrics& m);

// classify(), falling back to nearest_family() for Unclassified layers.
// Returns nullopt only for parameter-free stages.
std::optional<Family> routing_family(const metrics::LayerMetrics& m, ir::LayerKind kind);

struct Histogram {
  // Indexed by static_cast<size_t>(Family).
  std::array<std::size_t, 6> counts{};
  std::size_t total = 0;

  std::size_t count(Family f) const { return counts[static_cast<std::size_t>(f)]; }
  double classified_fraction() const;
};

// Counts each distinct parameterized layer once: LSTM gate MVMs are counted
// at their first timestep only, combine stages are skipped.
Histogram family_histogram(const ir::ModelGraph& model);
Histogram& operator+=(Histogram& lhs, const Histogram& rhs);

}  // namespace hetsim::families
