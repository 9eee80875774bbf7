#include "hetsim/families.hpp"

#include <cmath>
#include <limits>

#include "hetsim/units.hpp"

namespace hetsim::families {

namespace {

constexpr double kKB = static_cast<double>(units::kKiB);
constexpr double kMB = static_cast<double>(units::kMiB);
constexpr double kM = 1e6;

// Conv/FC precedence when several boxes match.
constexpr std::array<Family, 5> kPrecedence = {Family::F3, Family::F4, Family::F1, Family::F2,
                                               Family::F5};

double log_gap(double v, const Range& r) {
  if (v < r.lo) return std::log(r.lo / v);
  if (v > r.hi) return std::log(v / r.hi);
  return 0.0;
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::F1: return "F1";
    case Family::F2: return "F2";
    case Family::F3: return "F3";
    case Family::F4: return "F4";
    case Family::F5: return "F5";
    case Family::Unclassified: return "Unclassified";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view text) {
  for (Family f : {Family::F1, Family::F2, Family::F3, Family::F4, Family::F5, Family::Unclassified})
    if (to_string(f) == text) return f;
  return std::nullopt;
}

FamilyRanges nominal_ranges(Family f) {
  switch (f) {
    case Family::F1: return {{1 * kKB, 100 * kKB}, {780, 20000}, {30 * kM, 200 * kM}};
    case Family::F2: return {{100 * kKB, 500 * kKB}, {81, 400}, {20 * kM, 100 * kM}};
    case Family::F3: return {{0.9 * kMB, 18 * kMB}, {0, kMinimalReuse}, {0.1 * kM, 10 * kM}};
    case Family::F4: return {{0.5 * kMB, 2.5 * kMB}, {25, 64}, {5 * kM, 25 * kM}};
    case Family::F5: return {{1 * kKB, 100 * kKB}, {49, 600}, {0.5 * kM, 5 * kM}};
    case Family::Unclassified: break;
  }
  return {};
}

FamilyRanges matching_ranges(Family f) {
  auto widen = [](Range r) { return Range{r.lo * (1.0 - kBoundarySlack), r.hi * (1.0 + kBoundarySlack)}; };
  FamilyRanges n = nominal_ranges(f);
  FamilyRanges out{widen(n.param_bytes), widen(n.param_reuse), widen(n.macs)};
  if (f == Family::F3) out.param_reuse = n.param_reuse;
  return out;
}

bool matches(Family f, const metrics::LayerMetrics& m) {
  const FamilyRanges r = matching_ranges(f);
  return r.param_bytes.contains(static_cast<double>(m.param_bytes)) && r.param_reuse.contains(m.param_reuse) &&
         r.macs.contains(static_cast<double>(m.macs));
}

Family classify(const metrics::LayerMetrics& m, ir::LayerKind kind) {
  if (m.param_bytes == 0) return Family::Unclassified;
  if (kind == ir::LayerKind::LstmGate) {
    // Gate MVM MAC counts scale with the cell multiplicity, so LSTM gates are
    // matched to F3 on footprint and reuse alone.
    const FamilyRanges r = matching_ranges(Family::F3);
    if (r.param_bytes.contains(static_cast<double>(m.param_bytes)) && r.param_reuse.contains(m.param_reuse))
      return Family::F3;
  }
  for (Family f : kPrecedence)
    if (matches(f, m)) return f;
  return Family::Unclassified;
}

Family nearest_family(const metrics::LayerMetrics& m) {
  Family best = Family::Unclassified;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Family f : kPrecedence) {
    const FamilyRanges r = matching_ranges(f);
    const double a = log_gap(static_cast<double>(m.param_bytes), r.param_bytes);
    const double b = log_gap(m.param_reuse, r.param_reuse);
    const double c = log_gap(static_cast<double>(m.macs), r.macs);
    const double d = std::sqrt(a * a + b * b + c * c);
    if (d < best_dist) {
      best_dist = d;
      best = f;
    }
  }
  return best;
}

std::optional<Family> routing_family(const metrics::LayerMetrics& m, ir::LayerKind kind) {
  if (m.param_bytes == 0) return std::nullopt;
  const Family f = classify(m, kind);
  return f == Family::Unclassified ? nearest_family(m) : f;
}

double Histogram::classified_fraction() const {
  if (total == 0) return 0.0;
  return static_cast<double>(total - count(Family::Unclassified)) / static_cast<double>(total);
}

Histogram family_histogram(const ir::ModelGraph& model) {
  Histogram h;
  for (const auto& l : model.layers()) {
    if (!metrics::owns_weights(l)) continue;
    const auto m = metrics::layer_metrics(l);
    if (m.param_bytes == 0) continue;
    ++h.counts[static_cast<std::size_t>(classify(m, l.kind))];
    ++h.total;
  }
  return h;
}

Histogram& operator+=(Histogram& lhs, const Histogram& rhs) {
  for (std::size_t i = 0; i < lhs.counts.size(); ++i) lhs.counts[i] += rhs.counts[i];
  lhs.total += rhs.total;
  return lhs;
}

}  // namespace hetsim::families
