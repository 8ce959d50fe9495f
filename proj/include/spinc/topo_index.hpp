#pragma once

// Exact integer arithmetic for the gluing and characteristic-number index
// formulas in real dimension four, with integrality gates.

#include <cstdint>
#include <optional>

namespace spinc {

using i64 = std::int64_t;

struct FillingDescriptor {
  i64 signature = 0;
  i64 euler = 0;
  i64 h01 = 0;
  i64 h02 = 0;
  bool stein = false;
  // Renormalized holomorphic Euler characteristic sum_{q>=1} (-1)^q h^{0,q}.
  // In complex dimension 2 it defaults to -h01 + h02.
  std::optional<i64> chi_prime;
  int complex_dim = 2;

  // Throws AdmissibilityError for inconsistent data, InvalidArgument for malformed data.
  void validate() const;
  i64 chi_prime_value() const;
};

struct SpinCNumbers {
  std::optional<i64> c1_squared;
  std::optional<i64> c2;
  std::optional<i64> signature;
  std::optional<i64> euler;

  // 4 c2 = c1^2 - 3 sign - 2 chi; nullopt unless all four are present.
  std::optional<bool> consistent() const;
};

// Exact quotient num / den; IntegralityViolation when den does not divide num.
i64 exact_quotient(i64 num, i64 den, const char* what);

// ind_glued - chi'(X0) + chi'(X1) + cdeg.
i64 rind_weinstein(i64 ind_glued, const FillingDescriptor& x0, const FillingDescriptor& x1, i64 cdeg = 0);
// h01(X0) - h01(X1) + (sign0 - sign1 + chi0 - chi1)/4.
i64 rind_3d(const FillingDescriptor& x0, const FillingDescriptor& x1);
// (sign0 - sign1 + chi0 - chi1)/4.
i64 glued_double_index(const FillingDescriptor& x0, const FillingDescriptor& x1);

i64 ind_from_c1(const SpinCNumbers& nums);
i64 ind_from_c2(const SpinCNumbers& nums);

// -chi[X1] for the double X0 u -X1, -chi[X0] for the reversed one.
i64 seiberg_witten_dim(i64 x1_euler);
i64 seiberg_witten_dim_reversed(i64 x0_euler);
// (c1^2 - 3 sign - 2 chi)/4.
i64 seiberg_witten_dim_from_numbers(const SpinCNumbers& nums);
// Characteristic numbers of the glued double: sign0 - sign1, chi0 + chi1,
// c1^2 = 8 ind + sign, c2 from the consistency relation.
SpinCNumbers glued_double_numbers(const FillingDescriptor& x0, const FillingDescriptor& x1);

// Co-disk bundle of a closed oriented surface with the given Euler characteristic.
FillingDescriptor coball_descriptor(i64 euler_of_base);
i64 fio_index_surfaces(i64 base0_euler, i64 base1_euler);

i64 rind_bundle_coefficients(i64 ind_glued, i64 bterm0, i64 bterm1);

}  // namespace spinc
