#include "abw/report.hpp"

#include <cstdio>

namespace abw {

namespace {

// regime strings are fixed tokens without separators, so no CSV quoting is
// ever needed in these tables
std::string join_coords(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += format_g17(v[i]);
  }
  return out;
}

}  // namespace

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_comparison_csv(std::ostream& os,
                          const std::vector<ReportRow>& rows) {
  os << "step_n,omega_coords,exact,estimate,ratio,regime,dist_boundary,"
        "det_nB,phi\n";
  for (const ReportRow& r : rows) {
    os << r.step_n << ',' << join_coords(r.omega) << ',' << format_g17(r.exact)
       << ',' << format_g17(r.estimate) << ',' << format_g17(r.ratio) << ','
       << r.regime << ',' << format_g17(r.dist_boundary) << ','
       << format_g17(r.det_nb) << ',' << format_g17(r.phi) << '\n';
  }
}

void write_rate_csv(std::ostream& os, const std::vector<RateRow>& rows) {
  os << "delta_coords,phi,s_coords,det_B,dist_boundary\n";
  for (const RateRow& r : rows) {
    os << join_coords(r.delta) << ',' << format_g17(r.phi) << ','
       << join_coords(r.s) << ',' << format_g17(r.det_b) << ','
       << format_g17(r.dist_boundary) << '\n';
  }
}

void write_green_csv(std::ostream& os, const std::vector<GreenRow>& rows) {
  os << "omega_coords,zeta,series,estimate,ratio,regime,terms,tail_bound,"
        "certified\n";
  for (const GreenRow& r : rows) {
    os << join_coords(r.omega) << ',' << format_g17(r.zeta) << ','
       << format_g17(r.series) << ',' << format_g17(r.estimate) << ','
       << format_g17(r.ratio) << ',' << r.regime << ',' << r.terms << ','
       << format_g17(r.tail_bound) << ',' << (r.certified ? 1 : 0) << '\n';
  }
}

}  // namespace abw
