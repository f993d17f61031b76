#pragma once

// CSV persistence. Numeric output uses printf "%.17g" in the C locale so a
// round trip through text reproduces every double bit for bit.

#include <string>
#include <vector>

#include "overdict/corr_graph.hpp"
#include "overdict/types.hpp"

namespace overdict {

// Round-trip-exact decimal rendering of a double (printf %.17g).
std::string format_double(double v);

// Header "# rows=<R> cols=<C>", then one comma-separated line per row.
void write_matrix_csv(const std::string& path, const Matrix& M);
Matrix read_matrix_csv(const std::string& path);

// Header "# cols=<n>", then one comma-separated index list per column.
void write_supports_csv(const std::string& path,
                        const std::vector<std::vector<int>>& supports);
std::vector<std::vector<int>> read_supports_csv(const std::string& path);

// Header "# n=<n> rho=<rho>", then one "i,j" line per edge with i < j.
void write_graph_csv(const std::string& path, const CorrelationGraph& G);
CorrelationGraph read_graph_csv(const std::string& path);

}  // namespace overdict
