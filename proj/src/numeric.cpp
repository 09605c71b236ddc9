#include "sqrt2lab/numeric.hpp"

#include <cstdlib>

#include <mpfr.h>

#include "sqrt2lab/error.hpp"

namespace sqrt2lab {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonRepresentable: return "NonRepresentable";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ZeroValue: return "ZeroValue";
    case ErrorKind::ZeroTerm: return "ZeroTerm";
    case ErrorKind::ClassificationMismatch: return "ClassificationMismatch";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::PatternBreak: return "PatternBreak";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::DegenerateParams: return "DegenerateParams";
    case ErrorKind::OutsideSeparatrix: return "OutsideSeparatrix";
    case ErrorKind::InvalidProfile: return "InvalidProfile";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::Blowup: return "Blowup";
  }
  return "Unknown";
}

Real log_big(const BigInt& v) {
  if (sgn(v) <= 0) {
    throw DomainError(ErrorKind::ZeroValue, "logarithm of a non-positive integer");
  }
  const std::size_t bits = mpz_sizeinbase(v.get_mpz_t(), 2);
  if (bits <= 64) {
    return log(Real{v.get_ui()});
  }
  const std::size_t shift = bits - 64;
  BigInt top = v >> shift;
  static const Real ln2 = log(Real{2});
  return log(Real{top.get_ui()}) + Real{static_cast<unsigned long long>(shift)} * ln2;
}

Real to_real(const Rational& q) {
  Real out;
  mpfr_set_q(out.backend().data(), q.get_mpq_t(), MPFR_RNDN);
  return out;
}

std::string to_fixed(const Real& x, int decimals) {
  char* buf = nullptr;
  const int n = mpfr_asprintf(&buf, "%.*Rf", decimals, x.backend().data());
  if (n < 0) return {};
  std::string out(buf, static_cast<std::size_t>(n));
  mpfr_free_str(buf);
  return out;
}

}  // namespace sqrt2lab
