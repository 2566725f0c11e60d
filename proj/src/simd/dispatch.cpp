#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "kernel_tables.hpp"
#include "matchmix/error.hpp"

namespace matchmix::simd {

EllMatrix EllMatrix::from_rows(
    const std::vector<std::vector<std::pair<std::int32_t, double>>>& rows) {
  EllMatrix m;
  m.rows = rows.size();
  for (const auto& r : rows) m.width = std::max(m.width, r.size());
  m.cols.assign(m.width * m.rows, 0);
  m.vals.assign(m.width * m.rows, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t s = 0; s < m.width; ++s) {
      if (s < rows[r].size()) {
        m.cols[s * m.rows + r] = rows[r][s].first;
        m.vals[s * m.rows + r] = rows[r][s].second;
      } else {
        m.cols[s * m.rows + r] = static_cast<std::int32_t>(r);
      }
    }
  }
  return m;
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(MATCHMIX_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels(Isa isa) {
#if defined(MATCHMIX_HAVE_AVX2)
  if (isa == Isa::Avx2) {
    if (!isa_available(Isa::Avx2)) throw InvalidParameter("AVX2 kernels not supported on this CPU");
    return detail::avx2_table();
  }
#else
  if (isa == Isa::Avx2) throw InvalidParameter("AVX2 kernels not built");
#endif
  return detail::scalar_table();
}

Isa active_isa() {
  static const Isa chosen = [] {
    const char* env = std::getenv("MATCHMIX_ISA");
    if (env && std::string_view(env) == "scalar") return Isa::Scalar;
    return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  }();
  return chosen;
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable& active() {
  static const KernelTable& table = kernels(active_isa());
  return table;
}

namespace {
void require_same(std::size_t a, std::size_t b) {
  if (a != b) throw InvalidInput("vector length mismatch");
}
}  // namespace

void ell_multiply(const EllMatrix& m, std::span<const double> x, std::span<double> y) {
  require_same(x.size(), m.rows);
  require_same(y.size(), m.rows);
  active().ell_multiply(m, x.data(), y.data());
}

void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  require_same(a.size(), b.size());
  require_same(a.size(), out.size());
  active().hadamard(a.data(), b.data(), out.data(), a.size());
}

void average(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  require_same(a.size(), b.size());
  require_same(a.size(), out.size());
  active().average(a.data(), b.data(), out.data(), a.size());
}

void add_inplace(std::span<double> acc, std::span<const double> a) {
  require_same(acc.size(), a.size());
  active().add_inplace(acc.data(), a.data(), a.size());
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  require_same(a.size(), b.size());
  return active().l1_distance(a.data(), b.data(), a.size());
}

double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

double max_value(std::span<const double> a) { return active().max_value(a.data(), a.size()); }

double dot(std::span<const double> a, std::span<const double> b) {
  require_same(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

}  // namespace matchmix::simd
