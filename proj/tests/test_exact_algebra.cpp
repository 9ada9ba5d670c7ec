#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "polycut/lattice.hpp"

#include <random>

using namespace cps;

namespace {

FieldPtr sqrt2_field() {
  return NumberField::make({Int(-2), Int(0), Int(1)}, Rat(1), Rat(2));
}

FieldPtr golden_field() {
  // x^2 - x - 1, theta ~ 1.618
  return NumberField::make({Int(-1), Int(-1), Int(1)}, Rat(1), Rat(2));
}

Fs fs(const FieldPtr& f, long a, long b) {
  return Fs(f, {Rat(a), Rat(b)});
}

}  // namespace

TEST_CASE("rational parsing and canonical printing") {
  CHECK(parse_rational("3/6") == Rat(1, 2));
  CHECK(parse_rational("-7") == Rat(-7));
  CHECK(rational_string(make_rat(Int(4), Int(2))) == "2");
  CHECK(rational_string(Rat(-1, 3)) == "-1/3");
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("a/2"), ParseError);
  CHECK_THROWS_AS(parse_rational("1.5"), ParseError);
}

TEST_CASE("decimal printing rounds half to even") {
  CHECK(decimal_string(Rat(1, 2), 0) == "0");
  CHECK(decimal_string(Rat(3, 2), 0) == "2");
  CHECK(decimal_string(Rat(5, 2), 0) == "2");
  CHECK(decimal_string(Rat(1, 8), 2) == "0.12");   // 0.125 -> even
  CHECK(decimal_string(Rat(3, 8), 2) == "0.38");   // 0.375 -> even
  CHECK(decimal_string(Rat(-1, 8), 2) == "-0.12");
  CHECK(decimal_string(Rat(1, 3), 6) == "0.333333");
  CHECK(decimal_string(Rat(0), 3) == "0.000");
}

TEST_CASE("number field construction validates its contract") {
  CHECK_THROWS(NumberField::make({Int(2), Int(2)}, Rat(0), Rat(1)));  // not monic
  // (x-1)^2 = x^2 - 2x + 1 is not squarefree
  CHECK_THROWS(NumberField::make({Int(1), Int(-2), Int(1)}, Rat(0), Rat(2)));
  // interval with both roots of x^2 - 2
  CHECK_THROWS(NumberField::make({Int(-2), Int(0), Int(1)}, Rat(-2), Rat(2)));
  // interval with no root
  CHECK_THROWS(NumberField::make({Int(-2), Int(0), Int(1)}, Rat(2), Rat(3)));
  CHECK(sqrt2_field()->degree() == 2);
}

TEST_CASE("exact_compare spec examples") {
  FieldPtr f2 = sqrt2_field();
  FieldPtr fg = golden_field();

  // 1 + 0*theta vs itself
  CHECK(compare(fs(f2, 1, 0), fs(f2, 1, 0)) == 0);
  // theta vs 3/2 over x^2-2: sqrt(2) < 1.5
  CHECK(compare(Fs::theta(f2), Fs(Rat(3, 2))) < 0);
  // theta^2 vs theta + 1 over x^2-x-1: equal by the minimal polynomial
  Fs th = Fs::theta(fg);
  CHECK(compare(th * th, th + Fs(1)) == 0);
  // mismatched fields
  CHECK_THROWS_AS((void)compare(Fs::theta(f2), Fs::theta(fg)), FieldMismatch);
}

TEST_CASE("exact_compare is a total order on random triples") {
  FieldPtr f = golden_field();
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> coef(-6, 6);
  for (int it = 0; it < 200; ++it) {
    Fs a = fs(f, coef(rng), coef(rng));
    Fs b = fs(f, coef(rng), coef(rng));
    Fs c = fs(f, coef(rng), coef(rng));
    // antisymmetry
    CHECK(compare(a, b) == -compare(b, a));
    // transitivity
    if (compare(a, b) <= 0 && compare(b, c) <= 0) CHECK(compare(a, c) <= 0);
    // compatibility with subtraction
    CHECK(compare(a, b) == (a - b).sgn());
  }
}

TEST_CASE("field arithmetic: inverse, floor, enclosure") {
  FieldPtr f2 = sqrt2_field();
  Fs r = Fs::theta(f2);  // sqrt 2
  CHECK((r * r) == Fs(2));
  CHECK((r.inverse() * r) == Fs(1));
  CHECK(r.inverse() == r / Fs(2));
  CHECK(r.floor() == 1);
  CHECK((-r).floor() == -2);
  CHECK((r * Fs(10)).floor() == 14);
  QInterval e = r.enclosure(60);
  CHECK(e.width() <= Rat(Int(1), Int(1) << 60));
  CHECK(e.lo < Rat(142, 100) + Rat(1, 100));
  CHECK(r.to_double() == doctest::Approx(1.41421356237).epsilon(1e-11));
}

TEST_CASE("rational_restriction spec examples") {
  // g = 1: identity on rationals
  FieldPtr q = NumberField::rationals();
  FMat m(1, 2);
  m(0, 0) = Fs(Rat(1, 2));
  m(0, 1) = Fs(Rat(3));
  QMat r = rational_restriction(m, q->degree());
  CHECK(r.rows() == 1);
  CHECK(r(0, 0) == Rat(1, 2));

  // row (1, theta) over x^2-2 -> rows (1,0) and (0,1)
  FieldPtr f2 = sqrt2_field();
  FMat m2(1, 2);
  m2(0, 0) = Fs(1);
  m2(0, 1) = Fs::theta(f2);
  QMat r2 = rational_restriction(m2, 2);
  CHECK(r2.rows() == 2);
  CHECK(r2(0, 0) == Rat(1));
  CHECK(r2(0, 1) == Rat(0));
  CHECK(r2(1, 0) == Rat(0));
  CHECK(r2(1, 1) == Rat(1));

  // row (theta, -1, 1): integer kernel = span{(0,1,1)}
  FMat m3(1, 3);
  m3(0, 0) = Fs::theta(f2);
  m3(0, 1) = Fs(-1);
  m3(0, 2) = Fs(1);
  IntLattice ker = integer_kernel(rational_restriction(m3, 2));
  REQUIRE(ker.rank() == 1);
  CHECK(ker.basis(0, 0) == 0);
  CHECK(ker.basis(1, 0) == 1);
  CHECK(ker.basis(2, 0) == 1);
}

TEST_CASE("integer_kernel spec examples") {
  // zero map
  QMat z = QMat::Constant(1, 3, Rat(0));
  CHECK(integer_kernel(z).rank() == 3);
  // identity
  QMat id = QMat::Identity(3, 3);
  CHECK(integer_kernel(id).rank() == 0);
  // single equation (1, -2) -> span{(2,1)}
  QMat m(1, 2);
  m(0, 0) = Rat(1);
  m(0, 1) = Rat(-2);
  IntLattice k = integer_kernel(m);
  REQUIRE(k.rank() == 1);
  CHECK(k.basis(0, 0) == 2);
  CHECK(k.basis(1, 0) == 1);
}

TEST_CASE("integer kernel against brute force search") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<long> num(-3, 3);
  std::uniform_int_distribution<long> den(1, 3);
  std::uniform_int_distribution<int> dims(1, 4);
  for (int it = 0; it < 40; ++it) {
    int k = dims(rng), mrows = dims(rng);
    QMat m(mrows, k);
    for (int i = 0; i < mrows; ++i)
      for (int j = 0; j < k; ++j) m(i, j) = make_rat(Int(num(rng)), Int(den(rng)));
    IntLattice ker = integer_kernel(m);
    CHECK(ker.rank() + exact_rank<Rat>(m) == k);
    // every basis vector solves the system
    for (int c = 0; c < ker.rank(); ++c)
      for (int i = 0; i < mrows; ++i) {
        Rat acc(0);
        for (int j = 0; j < k; ++j) acc += m(i, j) * Rat(ker.basis(j, c));
        CHECK(acc == 0);
      }
    // brute force over [-B, B]^k (B small): membership agreement
    const long B = 3;
    std::vector<long> v(static_cast<size_t>(k), -B);
    while (true) {
      bool in_kernel = true;
      for (int i = 0; i < mrows && in_kernel; ++i) {
        Rat acc(0);
        for (int j = 0; j < k; ++j) acc += m(i, j) * Rat(v[static_cast<size_t>(j)]);
        in_kernel = acc == 0;
      }
      IVec iv(k);
      for (int j = 0; j < k; ++j) iv(j) = Int(v[static_cast<size_t>(j)]);
      CHECK(ker.contains(iv) == in_kernel);
      int t = 0;
      while (t < k && v[static_cast<size_t>(t)] == B) v[static_cast<size_t>(t++)] = -B;
      if (t == k) break;
      ++v[static_cast<size_t>(t)];
    }
  }
}

TEST_CASE("integer kernel output is saturated") {
  std::mt19937 rng(13);
  std::uniform_int_distribution<long> num(-4, 4);
  for (int it = 0; it < 30; ++it) {
    QMat m(2, 4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = Rat(num(rng));
    IntLattice ker = integer_kernel(m);
    if (ker.rank() == 0) continue;
    // saturation: no integer vector in the rational span outside the lattice;
    // equivalently v/p in span with v in lattice and prime p forces v/p in
    // the lattice. Check via index against the kernel of the span equations.
    QMat span_eq = nullspace<Rat>(to_rational(ker.basis).transpose()).transpose();
    IntLattice sat = integer_kernel(span_eq);
    LatticeIndex idx = hnf_and_index(ker, sat);
    REQUIRE(idx.kind == LatticeIndex::Finite);
    CHECK(idx.index == 1);
  }
}

TEST_CASE("hnf_and_index spec examples") {
  IntLattice z2 = IntLattice::full(2);
  LatticeIndex i1 = hnf_and_index(z2, z2);
  CHECK(i1.kind == LatticeIndex::Finite);
  CHECK(i1.index == 1);

  IMat twice = IMat::Identity(2, 2);
  twice(0, 0) = 2;
  twice(1, 1) = 2;
  IntLattice doubled(2, twice);
  LatticeIndex i2 = hnf_and_index(doubled, z2);
  CHECK(i2.kind == LatticeIndex::Finite);
  CHECK(i2.index == 4);

  // reversed: Z^2 is not inside 2Z^2
  CHECK(hnf_and_index(z2, doubled).kind == LatticeIndex::NotContained);

  // rank drop: x-axis inside Z^2
  IMat axis(2, 1);
  axis(0, 0) = 1;
  axis(1, 0) = 0;
  CHECK(hnf_and_index(IntLattice(2, axis), z2).kind == LatticeIndex::Infinite);
}

TEST_CASE("column HNF is canonical") {
  // two generating sets of the same lattice agree after HNF
  IMat a(2, 2), b(2, 3);
  a(0, 0) = 2; a(0, 1) = 1;
  a(1, 0) = 0; a(1, 1) = 3;
  // b spans the same lattice: columns a0, a1, a0+a1
  b(0, 0) = 2; b(0, 1) = 1; b(0, 2) = 3;
  b(1, 0) = 0; b(1, 1) = 3; b(1, 2) = 3;
  CHECK(hnf_columns(a) == hnf_columns(b));
}

TEST_CASE("field_rank spec examples") {
  FieldPtr f2 = sqrt2_field();
  FMat z = FMat::Constant(2, 3, Fs(0));
  CHECK(exact_rank<Fs>(z) == 0);
  FMat id = FMat::Identity(3, 3);
  CHECK(exact_rank<Fs>(id) == 3);
  // rows (1, theta), (theta, theta^2): second = theta * first
  FMat m(2, 2);
  m(0, 0) = Fs(1);
  m(0, 1) = Fs::theta(f2);
  m(1, 0) = Fs::theta(f2);
  m(1, 1) = Fs::theta(f2) * Fs::theta(f2);
  CHECK(exact_rank<Fs>(m) == 1);
}

TEST_CASE("quadratic identities stay exact through arithmetic chains") {
  FieldPtr fg = golden_field();
  Fs phi = Fs::theta(fg);
  // phi^5 = 5*phi + 3
  Fs p5 = phi * phi * phi * phi * phi;
  CHECK(p5 == Fs(5) * phi + Fs(3));
  // 1/phi = phi - 1
  CHECK(phi.inverse() == phi - Fs(1));
}
