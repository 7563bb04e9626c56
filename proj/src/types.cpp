#include "cscale/types.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "cscale/error.hpp"

namespace cscale {

void require_point(const CVec& z, int dim, const char* what) {
  if (dim > 0 && z.size() != dim) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " has dimension " +
                                                std::to_string(z.size()) + ", expected " +
                                                std::to_string(dim));
  }
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag())) {
      throw Error(ErrorKind::InvalidArgument, std::string(what) + " has a non-finite entry");
    }
  }
}

namespace {

double parse_real(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) throw Error(ErrorKind::InvalidArgument, "empty number");
  // std::from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::InvalidArgument, "malformed number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

CVec parse_point(std::string_view text) {
  std::vector<cd> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    std::size_t colon = item.find(':');
    if (colon == std::string_view::npos) {
      values.emplace_back(parse_real(item), 0.0);
    } else {
      values.emplace_back(parse_real(item.substr(0, colon)), parse_real(item.substr(colon + 1)));
    }
    start = end + 1;
  }
  CVec z(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) z[static_cast<Eigen::Index>(i)] = values[i];
  return z;
}

std::string format_point(const CVec& z) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (i) out << ',';
    out << z[i].real();
    if (z[i].imag() != 0.0) out << ':' << z[i].imag();
  }
  return out.str();
}

CVec make_point(std::initializer_list<cd> values) {
  CVec z(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (cd v : values) z[i++] = v;
  return z;
}

}  // namespace cscale
