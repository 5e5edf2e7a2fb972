#include <gtest/gtest.h>

#include "slowvary/algebra/scalar.hpp"
#include "slowvary/error.hpp"

using slowvary::algebra::Scalar;

TEST(Scalar, StoredReduced) {
  Scalar a(6, -4);
  EXPECT_EQ(a.re().get_num(), -3);
  EXPECT_EQ(a.re().get_den(), 2);
  EXPECT_EQ(a.str(), "-3/2");
}

TEST(Scalar, ShearRationalsExact) {
  // 2/105 and 4/17325 survive arithmetic without rounding.
  Scalar x = Scalar(2, 105) * Scalar(2, 165);
  EXPECT_EQ(x, Scalar(4, 17325));
  EXPECT_EQ(x / Scalar(4, 17325), Scalar(1));
}

TEST(Scalar, GaussianArithmetic) {
  Scalar i = Scalar::i();
  EXPECT_EQ(i * i, Scalar(-1));
  Scalar z(mpq_class(1, 2), mpq_class(-3));
  EXPECT_EQ(z * z.conj(), Scalar(mpq_class(37, 4)));
  EXPECT_EQ((z / z), Scalar(1));
  EXPECT_EQ(Scalar(4) * i, Scalar(mpq_class(0), mpq_class(4)));
}

TEST(Scalar, PrintParseRoundTrip) {
  for (const char* s : {"0", "3", "-3/2", "i", "-i", "-2/3*i", "(1+2*i)", "(-1/2-7/3*i)"}) {
    Scalar v = Scalar::parse(s);
    EXPECT_EQ(v.str(), s);
    EXPECT_EQ(Scalar::parse(v.str()), v);
  }
}

TEST(Scalar, DivisionByZeroThrows) { EXPECT_THROW(Scalar(1) / Scalar(0), slowvary::Error); }

TEST(Scalar, ToComplex) {
  auto c = Scalar(mpq_class(1, 4), mpq_class(-1, 2)).to_complex();
  EXPECT_DOUBLE_EQ(c.real(), 0.25);
  EXPECT_DOUBLE_EQ(c.imag(), -0.5);
}
