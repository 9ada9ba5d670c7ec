#include "polycut/rational.hpp"

#include <cctype>

namespace cps {

namespace {

bool digits_only(const std::string& s, size_t from, size_t to) {
  if (from >= to) return false;
  for (size_t i = from; i < to; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rat parse_rational(const std::string& s) {
  size_t slash = s.find('/');
  auto check_int = [&](size_t from, size_t to) {
    size_t start = from;
    if (start < to && (s[start] == '-' || s[start] == '+')) ++start;
    if (!digits_only(s, start, to))
      throw ParseError("malformed rational: \"" + s + "\"");
  };
  if (slash == std::string::npos) {
    check_int(0, s.size());
  } else {
    check_int(0, slash);
    if (!digits_only(s, slash + 1, s.size()))
      throw ParseError("malformed rational: \"" + s + "\"");
  }
  Rat v;
  if (mpq_set_str(v.get_mpq_t(), s.c_str(), 10) != 0)
    throw ParseError("malformed rational: \"" + s + "\"");
  if (v.get_den() == 0) throw ParseError("zero denominator: \"" + s + "\"");
  v.canonicalize();
  return v;
}

std::string rational_string(const Rat& v) {
  return v.get_den() == 1 ? v.get_num().get_str() : v.get_str();
}

std::string decimal_string(const Rat& v, int digits) {
  if (digits < 0) digits = 0;
  bool neg = v < 0;
  Rat a = rat_abs(v);
  Int pow10 = 1;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  Int num = a.get_num() * pow10;
  const Int& den = a.get_den();
  Int q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  Int twice = 2 * r;
  int c = cmp(twice, den);
  if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t())))
    q += 1;
  std::string ds = q.get_str();
  if (static_cast<int>(ds.size()) <= digits)
    ds.insert(0, std::string(digits + 1 - ds.size(), '0'));
  std::string out;
  if (neg && (q != 0 || digits > 0)) out = "-";
  if (digits == 0) {
    out += ds;
  } else {
    out += ds.substr(0, ds.size() - digits);
    out += '.';
    out += ds.substr(ds.size() - digits);
  }
  // "-0.000" would be all zero digits; normalize the sign away.
  if (out.find_first_of("123456789") == std::string::npos && !out.empty() &&
      out[0] == '-')
    out.erase(0, 1);
  return out;
}

}  // namespace cps
