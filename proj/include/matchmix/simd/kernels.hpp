#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

// Dense and sparse vector kernels used by every exact evolution. Each kernel
// has a scalar reference implementation and, on x86-64, an AVX2 variant picked
// at runtime. Elementwise kernels and the sparse product give bit-identical
// results across variants; reductions agree up to summation order.
namespace matchmix::simd {

enum class Isa { Scalar, Avx2 };

// Sparse matrix in ELLPACK layout: every row has `width` slots, stored
// slot-major (entry (slot, row) lives at slot * rows + row). Padding slots
// point at the row itself with value 0.
struct EllMatrix {
  std::size_t rows = 0;
  std::size_t width = 0;
  std::vector<std::int32_t> cols;
  std::vector<double> vals;

  static EllMatrix from_rows(const std::vector<std::vector<std::pair<std::int32_t, double>>>& rows);
};

struct KernelTable {
  // y[r] = sum over slots of vals * x[cols]
  void (*ell_multiply)(const EllMatrix& m, const double* x, double* y);
  void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);
  // out = (a + b) / 2
  void (*average)(const double* a, const double* b, double* out, std::size_t n);
  void (*add_inplace)(double* acc, const double* a, std::size_t n);
  double (*l1_distance)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*max_value)(const double* a, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
};

bool isa_available(Isa isa);
const KernelTable& kernels(Isa isa);
// Best available variant; MATCHMIX_ISA=scalar in the environment forces the
// reference kernels.
Isa active_isa();
const char* isa_name(Isa isa);
const KernelTable& active();

void ell_multiply(const EllMatrix& m, std::span<const double> x, std::span<double> y);
void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out);
void average(std::span<const double> a, std::span<const double> b, std::span<double> out);
void add_inplace(std::span<double> acc, std::span<const double> a);
double l1_distance(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double max_value(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace matchmix::simd
