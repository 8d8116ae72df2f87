#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace abw {

// One row of the estimate-comparison table.  Cells that do not apply to a
// row stay NaN and are written as "nan".
struct ReportRow {
  int64_t step_n = 0;
  std::vector<double> omega;  // coordinates of the target point
  double exact = std::numeric_limits<double>::quiet_NaN();
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  std::string regime;
  double dist_boundary = std::numeric_limits<double>::quiet_NaN();
  double det_nb = std::numeric_limits<double>::quiet_NaN();
  double phi = std::numeric_limits<double>::quiet_NaN();
};

// CSV with the fixed header
//   step_n,omega_coords,exact,estimate,ratio,regime,dist_boundary,det_nB,phi
// floats carry 17 significant digits and omega coordinates are joined by
// ';' inside the one omega_coords cell.  Byte-identical for equal inputs.
void write_comparison_csv(std::ostream& os, const std::vector<ReportRow>& rows);

// One row of the rate-function sweep: velocity, rate value, saddle point,
// Hessian determinant, and boundary distance.
struct RateRow {
  std::vector<double> delta;
  double phi = 0;
  std::vector<double> s;
  double det_b = 0;
  double dist_boundary = 0;
};

// CSV header: delta_coords,phi,s_coords,det_B,dist_boundary
void write_rate_csv(std::ostream& os, const std::vector<RateRow>& rows);

// One row of the resolvent table: series value against the boundary-regime
// estimate, with the series' own convergence report.
struct GreenRow {
  std::vector<double> omega;
  double zeta = 0;
  double series = 0;
  double estimate = 0;
  double ratio = 0;
  std::string regime;  // "subcritical" or "critical"
  int64_t terms = 0;
  double tail_bound = 0;
  bool certified = false;
};

// CSV header:
//   omega_coords,zeta,series,estimate,ratio,regime,terms,tail_bound,certified
void write_green_csv(std::ostream& os, const std::vector<GreenRow>& rows);

// The %.17g float formatting shared by every table; round-trips doubles.
std::string format_g17(double v);

}  // namespace abw
