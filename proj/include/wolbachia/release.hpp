#pragma once

#include <string>
#include <variant>
#include <vector>

namespace wolbachia {

/// r(t) = level.
struct ConstantRelease {
  double level = 0.0;

  bool operator==(const ConstantRelease&) const = default;
};

/// r(t) = -(2 m / T)(t - T): starts at 2m, reaches zero at the horizon.
struct LinearDecreasingRelease {
  double magnitude = 0.0;

  bool operator==(const LinearDecreasingRelease&) const = default;
};

/// r(t) = m sech(0.01 (t - peak_day)).
struct BumpRelease {
  double magnitude = 0.0;
  double peak_day = 50.0;

  bool operator==(const BumpRelease&) const = default;
};

/// N-piece piecewise-constant policy. With l = ceil(T / N), piece i (1-based)
/// covers days (l (i-1), l i]; the last piece is truncated at T.
struct PiecewiseRelease {
  std::vector<double> values;

  bool operator==(const PiecewiseRelease&) const = default;
};

using ReleaseShape = std::variant<ConstantRelease, LinearDecreasingRelease,
                                  BumpRelease, PiecewiseRelease>;

/// A release shape bound to the horizon [0, T] it is evaluated on.
class ReleaseSchedule {
 public:
  ReleaseSchedule(ReleaseShape shape, int horizon);

  static ReleaseSchedule zero(int horizon) {
    return ReleaseSchedule(ConstantRelease{0.0}, horizon);
  }

  const ReleaseShape& shape() const noexcept { return shape_; }
  int horizon() const noexcept { return horizon_; }

  /// Release rate at day t in [0, T]. At an interior breakpoint of a
  /// piecewise schedule the value of the piece ending there is returned.
  double evaluate(double t) const;

  /// Interior discontinuities in (0, T), ascending. Empty for smooth shapes.
  std::vector<double> breakpoints() const;

  /// Largest value of r over [0, T].
  double peak() const;

  /// Copy with the magnitude parameter(s) multiplied by `factor`.
  ReleaseSchedule scaled(double factor) const;

  /// Short textual form, e.g. "bump:1000@50"; parse() accepts it back.
  std::string describe() const;
  static ReleaseSchedule parse(const std::string& spec, int horizon);

  bool operator==(const ReleaseSchedule&) const = default;

 private:
  ReleaseShape shape_;
  int horizon_;
};

/// Days per piece, l = ceil(T / N).
int piece_length(int horizon, int pieces);

/// 1-based piece index for day t, ceil(t / l) clamped to [1, N].
int piece_index(double t, int horizon, int pieces);

/// Number of integer days in 1..T that fall into each piece.
std::vector<int> piece_day_counts(int horizon, int pieces);

/// Sum over t = 1..T of evaluate(t).
double total_release(const ReleaseSchedule& schedule);

/// Rescale each schedule so that its maximum over [0, T] equals `peak`.
std::vector<ReleaseSchedule> normalize_same_peak(
    const std::vector<ReleaseSchedule>& schedules, double peak);

/// Rescale each schedule so that total_release equals `total`.
std::vector<ReleaseSchedule> normalize_same_total(
    const std::vector<ReleaseSchedule>& schedules, double total);

}  // namespace wolbachia
