#ifndef SPMRP_UTIL_HPP
#define SPMRP_UTIL_HPP

#include <functional>
#include <string>
#include <vector>

namespace spmrp {

// Worker count from SPMRP_THREADS, else hardware concurrency. Outputs never
// depend on it; it only partitions work.
int default_workers();

// Runs fn(i) for i in [0, n) across workers; fn must write only to
// disjoint slots.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

// Type-7 quantile (linear interpolation between order statistics);
// values must be sorted ascending.
double quantile_sorted(const std::vector<double>& sorted, double p);

// Shortest round-trip decimal text for a double.
std::string format_double(double v);

// Write via temp file + rename so readers never see partial content.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace spmrp

#endif
