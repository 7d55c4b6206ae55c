#ifndef SPMRP_SVG_HPP
#define SPMRP_SVG_HPP

#include <string>

#include "spmrp/evaluate.hpp"

namespace spmrp {

// Static scatter of county estimates (with 95% whiskers) against baseline
// counts, identity line included.
std::string coverage_chart_svg(const ComparisonReport& report, const std::string& title);

}  // namespace spmrp

#endif
