#include "spinc/topo_index.hpp"

#include <string>

#include "spinc/errors.hpp"

namespace spinc {

void FillingDescriptor::validate() const {
  if (h01 < 0 || h02 < 0) throw InvalidArgument("Hodge numbers must be non-negative");
  if (complex_dim < 1) throw InvalidArgument("complex dimension must be positive");
  if (complex_dim != 2 && !chi_prime)
    throw InvalidArgument("chi_prime must be supplied outside complex dimension 2");
  if (complex_dim == 2 && chi_prime && *chi_prime != -h01 + h02)
    throw AdmissibilityError("chi_prime = " + std::to_string(*chi_prime) + " contradicts -h01 + h02 = " +
                             std::to_string(-h01 + h02));
  if (stein && (h01 != 0 || h02 != 0 || chi_prime_value() != 0))
    throw AdmissibilityError("a Stein filling has vanishing h01, h02 and chi_prime");
}

i64 FillingDescriptor::chi_prime_value() const {
  if (chi_prime) return *chi_prime;
  if (complex_dim != 2) throw InvalidArgument("chi_prime must be supplied outside complex dimension 2");
  return -h01 + h02;
}

std::optional<bool> SpinCNumbers::consistent() const {
  if (!c1_squared || !c2 || !signature || !euler) return std::nullopt;
  return 4 * *c2 == *c1_squared - 3 * *signature - 2 * *euler;
}

i64 exact_quotient(i64 num, i64 den, const char* what) {
  if (num % den != 0)
    throw IntegralityViolation(std::string(what) + ": " + std::to_string(num) + "/" + std::to_string(den) +
                                   " is not an integer",
                               num, den);
  return num / den;
}

i64 rind_weinstein(i64 ind_glued, const FillingDescriptor& x0, const FillingDescriptor& x1, i64 cdeg) {
  x0.validate();
  x1.validate();
  return ind_glued - x0.chi_prime_value() + x1.chi_prime_value() + cdeg;
}

i64 glued_double_index(const FillingDescriptor& x0, const FillingDescriptor& x1) {
  x0.validate();
  x1.validate();
  return exact_quotient(x0.signature - x1.signature + x0.euler - x1.euler, 4, "glued double index");
}

i64 rind_3d(const FillingDescriptor& x0, const FillingDescriptor& x1) {
  return x0.h01 - x1.h01 + glued_double_index(x0, x1);
}

i64 ind_from_c1(const SpinCNumbers& nums) {
  if (!nums.c1_squared || !nums.signature) throw InvalidArgument("ind_from_c1 needs c1^2 and the signature");
  return exact_quotient(*nums.c1_squared - *nums.signature, 8, "index from c1^2");
}

i64 ind_from_c2(const SpinCNumbers& nums) {
  if (!nums.c2 || !nums.signature || !nums.euler) throw InvalidArgument("ind_from_c2 needs c2, signature and euler");
  if (nums.consistent() == false)
    throw AdmissibilityError("characteristic numbers violate 4 c2 = c1^2 - 3 sign - 2 chi");
  return exact_quotient(2 * *nums.c2 + *nums.signature + *nums.euler, 4, "index from c2");
}

i64 seiberg_witten_dim(i64 x1_euler) { return -x1_euler; }
i64 seiberg_witten_dim_reversed(i64 x0_euler) { return -x0_euler; }

i64 seiberg_witten_dim_from_numbers(const SpinCNumbers& nums) {
  if (!nums.c1_squared || !nums.signature || !nums.euler)
    throw InvalidArgument("formal dimension needs c1^2, signature and euler");
  return exact_quotient(*nums.c1_squared - 3 * *nums.signature - 2 * *nums.euler, 4, "formal dimension");
}

SpinCNumbers glued_double_numbers(const FillingDescriptor& x0, const FillingDescriptor& x1) {
  const i64 ind = glued_double_index(x0, x1);
  SpinCNumbers s;
  s.signature = x0.signature - x1.signature;
  // The gluing locus is a closed 3-manifold, which has Euler characteristic zero.
  s.euler = x0.euler + x1.euler;
  s.c1_squared = 8 * ind + *s.signature;
  s.c2 = exact_quotient(*s.c1_squared - 3 * *s.signature - 2 * *s.euler, 4, "c2 of the glued double");
  return s;
}

FillingDescriptor coball_descriptor(i64 euler_of_base) {
  if (euler_of_base % 2 != 0 || euler_of_base > 2)
    throw AdmissibilityError("a closed oriented surface has even Euler characteristic at most 2 (got " +
                             std::to_string(euler_of_base) + ")");
  FillingDescriptor d;
  d.euler = euler_of_base;
  d.signature = (euler_of_base > 0) - (euler_of_base < 0);
  d.stein = true;
  d.chi_prime = 0;
  return d;
}

i64 fio_index_surfaces(i64 base0_euler, i64 base1_euler) {
  const FillingDescriptor x0 = coball_descriptor(base0_euler);
  const FillingDescriptor x1 = coball_descriptor(base1_euler);
  if (base0_euler != base1_euler)
    throw AdmissibilityError("co-sphere bundles of surfaces with different Euler characteristics are not "
                             "contactomorphic");
  return glued_double_index(x0, x1);
}

i64 rind_bundle_coefficients(i64 ind_glued, i64 bterm0, i64 bterm1) { return ind_glued - bterm0 + bterm1; }

}  // namespace spinc
