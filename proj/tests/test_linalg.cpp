#include <doctest.h>

#include <stdexcept>

#include "capasim/linalg.hpp"
#include "capasim/rng.hpp"

using namespace capasim;

TEST_CASE("dft_matrix small cases") {
  const ComplexMatrix f1 = dft_matrix(1);
  CHECK(f1.rows() == 1);
  CHECK(f1(0, 0).real() == doctest::Approx(1.0));
  CHECK(f1(0, 0).imag() == doctest::Approx(0.0));

  const double s = 1.0 / std::sqrt(2.0);
  const ComplexMatrix f2 = dft_matrix(2);
  CHECK(f2(0, 0).real() == doctest::Approx(s));
  CHECK(f2(0, 1).real() == doctest::Approx(s));
  CHECK(f2(1, 0).real() == doctest::Approx(s));
  CHECK(f2(1, 1).real() == doctest::Approx(-s));
  CHECK(std::abs(f2(1, 1).imag()) < 1e-15);

  // n=4, entry (1,3) = exp(-j 3 pi / 2)/2 = j/2
  const ComplexMatrix f4 = dft_matrix(4);
  CHECK(f4(1, 3).real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f4(1, 3).imag() == doctest::Approx(0.5));
}

TEST_CASE("dft_matrix rejects n=0") {
  CHECK_THROWS_AS(dft_matrix(0), std::invalid_argument);
}

TEST_CASE("dft_matrix unitary for n in 1..256") {
  for (Eigen::Index n = 1; n <= 256; ++n) {
    CHECK(frobenius_distance_to_identity(dft_matrix(n)) < 1e-10);
  }
}

TEST_CASE("kron identities and block permutation") {
  Rng rng(7);
  ComplexMatrix b(2, 3);
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.cgaussian();

  const ComplexMatrix i1 = ComplexMatrix::Identity(1, 1);
  CHECK((kron(i1, b) - b).norm() == doctest::Approx(0.0));

  ComplexMatrix two(1, 1);
  two(0, 0) = cd(2.0, 0.0);
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  CHECK((kron(two, i2) - 2.0 * i2).norm() == doctest::Approx(0.0));

  ComplexMatrix swap(2, 2);
  swap << cd(0, 0), cd(1, 0), cd(1, 0), cd(0, 0);
  ComplexVector e0 = ComplexVector::Zero(4);
  e0(0) = cd(1, 0);
  const ComplexVector shifted = kron(swap, i2) * e0;
  CHECK(std::abs(shifted(2) - cd(1, 0)) < 1e-15);
  CHECK(shifted.norm() == doctest::Approx(1.0));
}

TEST_CASE("kron mixed-product and associativity properties") {
  Rng rng(11);
  auto random_matrix = [&](Eigen::Index r, Eigen::Index c) {
    ComplexMatrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.cgaussian();
    return m;
  };
  for (int rep = 0; rep < 5; ++rep) {
    const ComplexMatrix a = random_matrix(2, 2), b = random_matrix(3, 3);
    const ComplexMatrix c = random_matrix(2, 2), d = random_matrix(3, 3);
    CHECK((kron(a, b) * kron(c, d) - kron(a * c, b * d)).norm() < 1e-12);
    const ComplexMatrix e = random_matrix(2, 3);
    CHECK((kron(kron(a, b), e) - kron(a, kron(b, e))).norm() < 1e-12);
  }
}

TEST_CASE("cyclic_shift_matrix behavior") {
  CHECK((cyclic_shift_matrix(4, 0) - ComplexMatrix::Identity(4, 4)).norm() == doctest::Approx(0.0));

  ComplexVector e0 = ComplexVector::Zero(4);
  e0(0) = cd(1, 0);
  const ComplexVector moved = cyclic_shift_matrix(4, 1) * e0;
  CHECK(std::abs(moved(1) - cd(1, 0)) < 1e-15);

  CHECK((cyclic_shift_matrix(4, 6) - cyclic_shift_matrix(4, 2)).norm() == doctest::Approx(0.0));
  CHECK((cyclic_shift_matrix(5, -1) - cyclic_shift_matrix(5, 4)).norm() == doctest::Approx(0.0));
}

TEST_CASE("cyclic_shift_matrix is a 0/1 permutation with composition law") {
  Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.next_u64() % 16);
    const long a = static_cast<long>(rng.next_u64() % 40);
    const long b = static_cast<long>(rng.next_u64() % 40);
    const ComplexMatrix pa = cyclic_shift_matrix(n, a);
    for (Eigen::Index i = 0; i < n; ++i) {
      double row = 0.0, col = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double vr = pa(i, j).real(), vc = pa(j, i).real();
        CHECK((vr == 0.0 || vr == 1.0));
        row += vr;
        col += vc;
      }
      CHECK(row == doctest::Approx(1.0));
      CHECK(col == doctest::Approx(1.0));
    }
    CHECK((pa * cyclic_shift_matrix(n, b) - cyclic_shift_matrix(n, a + b)).norm() < 1e-15);
  }
}

TEST_CASE("hermitian_solve") {
  Rng rng(5);
  ComplexVector b(4);
  for (Eigen::Index i = 0; i < 4; ++i) b(i) = rng.cgaussian();

  const ComplexMatrix eye = ComplexMatrix::Identity(4, 4);
  CHECK((hermitian_solve(eye, b) - b).norm() < 1e-12);
  CHECK((hermitian_solve(2.0 * eye, b) - 0.5 * b).norm() < 1e-12);

  for (int rep = 0; rep < 20; ++rep) {
    ComplexMatrix m(4, 4);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.cgaussian();
    const ComplexMatrix a = m * m.adjoint() + eye;
    ComplexVector rhs(4);
    for (Eigen::Index i = 0; i < 4; ++i) rhs(i) = rng.cgaussian();
    const ComplexVector x = hermitian_solve(a, rhs);
    CHECK((a * x - rhs).norm() <= 1e-10 * rhs.norm());
  }

  CHECK_THROWS_AS(hermitian_solve(ComplexMatrix::Zero(3, 3), ComplexVector::Ones(3)),
                  std::runtime_error);
}

TEST_CASE("frobenius_distance_to_identity") {
  CHECK(frobenius_distance_to_identity(ComplexMatrix::Identity(8, 8)) == doctest::Approx(0.0));
  CHECK(frobenius_distance_to_identity(2.0 * ComplexMatrix::Identity(2, 2)) ==
        doctest::Approx(3.0 * std::sqrt(2.0)));
  CHECK(frobenius_distance_to_identity(dft_matrix(16)) < 1e-12);
}
