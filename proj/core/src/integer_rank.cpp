#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hodgekit/complex.hpp"
#include "hodgekit/errors.hpp"

namespace hodgekit {

namespace {

__extension__ using Wide = __int128;

using Entry = std::pair<Index, std::int64_t>;  // (row, value), rows ascending
using Column = std::vector<Entry>;

std::int64_t checked(Wide v) {
  if (v > INT64_MAX || v < INT64_MIN)
    throw Error(ErrorCode::numerical, "integer overflow during exact rank elimination");
  return static_cast<std::int64_t>(v);
}

// col <- a * col - b * other, which cancels the lowest entry when
// a = low(other) and b = low(col).
Column combine(const Column& col, std::int64_t a, const Column& other, std::int64_t b) {
  Column out;
  out.reserve(col.size() + other.size());
  std::size_t i = 0, j = 0;
  while (i < col.size() || j < other.size()) {
    Wide v = 0;
    Index row;
    if (j == other.size() || (i < col.size() && col[i].first < other[j].first)) {
      row = col[i].first;
      v = static_cast<Wide>(a) * col[i++].second;
    } else if (i == col.size() || other[j].first < col[i].first) {
      row = other[j].first;
      v = -static_cast<Wide>(b) * other[j++].second;
    } else {
      row = col[i].first;
      v = static_cast<Wide>(a) * col[i++].second - static_cast<Wide>(b) * other[j++].second;
    }
    if (v != 0) out.emplace_back(row, checked(v));
  }
  std::int64_t g = 0;
  for (const auto& e : out) g = std::gcd(g, e.second < 0 ? -e.second : e.second);
  if (g > 1)
    for (auto& e : out) e.second /= g;
  return out;
}

}  // namespace

int integer_rank(const IntMatrix& m) {
  // Column reduction keyed on the lowest nonzero row. Fraction-free updates
  // keep every entry integral, so the rank is exact over Q.
  std::unordered_map<Index, Column> pivot_column;
  int rank = 0;
  for (Eigen::Index j = 0; j < m.outerSize(); ++j) {
    Column col;
    for (IntMatrix::InnerIterator it(m, j); it; ++it)
      if (it.value() != 0) col.emplace_back(static_cast<Index>(it.row()), it.value());
    while (!col.empty()) {
      const auto found = pivot_column.find(col.back().first);
      if (found == pivot_column.end()) break;
      const Column& other = found->second;
      col = combine(col, other.back().second, other, col.back().second);
    }
    if (!col.empty()) {
      const Index low = col.back().first;
      pivot_column.emplace(low, std::move(col));
      ++rank;
    }
  }
  return rank;
}

}  // namespace hodgekit
