#include <cmath>
#include <complex>

#include "doctest.h"
#include "grokbench/fma.hpp"
#include "grokbench/rng.hpp"

using namespace grokbench;

namespace {

// Independent evaluation of the addition form with raw trigonometric sums,
// sharing no code with the dft() path.
std::complex<double> fma_add_reference(const Vector& x, int cls, int p) {
  using cd = std::complex<double>;
  const double root_p = std::sqrt(static_cast<double>(p));
  cd total = 0.0;
  for (int j = 0; j < p; ++j) {
    cd f1 = 0.0, f2 = 0.0, fe = 0.0;
    for (int k = 0; k < p; ++k) {
      const cd w = std::polar(1.0 / root_p, -2.0 * M_PI * j * k / p);
      f1 += w * x[k];
      f2 += w * x[p + k];
      if (k == cls) fe = w;
    }
    total += f1 * f2 * std::conj(fe);
  }
  return root_p * total;
}

}  // namespace

TEST_CASE("appendix worked example at p = 3") {
  const FmaModel add3 = make_fma(3, FmaMode::Add);
  const Vector x = encode_pair(1, 2, 3);
  CHECK(fma_eval(add3, x, 0) == doctest::Approx(1.0));
  CHECK(fma_eval(add3, x, 1) == doctest::Approx(0.0));
  CHECK(fma_eval(add3, x, 2) == doctest::Approx(0.0));

  // intermediate: F e_1 . F e_2 = (1/sqrt(3)) F e_0
  const CMatrix f = dft(3);
  const CVector lhs = f.col(1).cwiseProduct(f.col(2));
  const CVector rhs = f.col(0) / std::sqrt(3.0);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fma reproduces the cayley tables") {
  for (int p : {3, 5, 7}) {
    double err_add = 0.0, err_sub = 0.0;
    CHECK(fma_table_check(make_fma(p, FmaMode::Add), ModTask(Op::Add, p), 1e-8, &err_add));
    CHECK(fma_table_check(make_fma(p, FmaMode::Sub), ModTask(Op::Sub, p), 1e-8, &err_sub));
    CHECK(err_add < 1e-10);
    CHECK(err_sub < 1e-10);
  }
  // wrong mode against the wrong table fails
  CHECK(!fma_table_check(make_fma(5, FmaMode::Add), ModTask(Op::Sub, 5)));
}

TEST_CASE("imaginary residue vanishes on one-hot inputs") {
  for (int p : {5, 11}) {
    const FmaModel add = make_fma(p, FmaMode::Add);
    const FmaModel sub = make_fma(p, FmaMode::Sub);
    for (const TableRow& row : make_table(ModTask(Op::Add, p))) {
      const Vector x = encode_pair(row.a, row.b, p);
      for (int cls = 0; cls < p; ++cls) {
        CHECK(std::abs(fma_eval_complex(add, x, cls).imag()) < 1e-9);
        CHECK(std::abs(fma_eval_complex(sub, x, cls).imag()) < 1e-9);
      }
    }
  }
}

TEST_CASE("fma agrees with an independent complex-arithmetic evaluation") {
  const int p = 5;
  const FmaModel add = make_fma(p, FmaMode::Add);
  // the spec's out-of-domain probe: x1 = e0 + e1, x2 = e0
  Vector x = Vector::Zero(2 * p);
  x[0] = 1.0;
  x[1] = 1.0;
  x[p] = 1.0;
  for (int cls = 0; cls < p; ++cls) {
    const std::complex<double> ref = fma_add_reference(x, cls, p);
    const std::complex<double> got = fma_eval_complex(add, x, cls);
    CHECK(std::abs(got - ref) < 1e-10);
  }
  // and on fully random real inputs
  Xoshiro256ss rng(17);
  for (int t = 0; t < 20; ++t) {
    for (int i = 0; i < 2 * p; ++i) x[i] = rng.gaussian();
    for (int cls = 0; cls < p; ++cls)
      CHECK(std::abs(fma_eval_complex(add, x, cls) - fma_add_reference(x, cls, p)) < 1e-9);
  }
}

TEST_CASE("fma_eval rejects bad shapes") {
  const FmaModel add = make_fma(3, FmaMode::Add);
  CHECK_THROWS_AS(fma_eval(add, Vector::Zero(5), 0), std::invalid_argument);
  CHECK_THROWS_AS(fma_eval(add, Vector::Zero(6), 3), std::invalid_argument);
}

TEST_CASE("theorem-1 ensembles verify at small moduli") {
  for (int p : {3, 5}) {
    const Theorem1Ensemble ens = theorem1_build(p);
    // structure: zero diagonal blocks, M_1 off-diagonal is the single shift
    for (int cls = 0; cls < p; ++cls) {
      CHECK(ens.m[cls].block(0, 0, p, p).norm() == 0.0);
      CHECK(ens.m[cls].block(p, p, p, p).norm() == 0.0);
    }
    Vector e1 = Vector::Zero(p);
    e1[1] = 1.0;
    const Matrix shift = circulant({e1, BlockKind::Circulant});
    CHECK((ens.m[1].block(0, p, p, p) - shift).norm() < 1e-15);

    const Theorem1Report rep = theorem1_verify(ens, 100, 99);
    CHECK(rep.pass(1e-8));
    CHECK(rep.lambda_match == "-1/(2p+2)");
    CHECK(rep.lambda_fit == doctest::Approx(-1.0 / (2 * p + 2)).epsilon(1e-8));
    CHECK(rep.lambda_fit_residual < 1e-8);

    // f_0 on the sub ensemble: 1 iff a == b
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        Vector x = encode_pair(a, b, p);
        double want = a == b ? 1.0 : 0.0;
        double got = 0.0;
        {  // evaluate through the stored alpha with the quadratic kernel
          const Vector mx = ens.m[0] * x;
          for (int aa = 0; aa < p; ++aa)
            for (int bb = 0; bb < p; ++bb) {
              const double v = mx[aa] + mx[p + bb];
              got += ens.alpha[0](aa, bb) * v * v;
            }
        }
        CHECK(got == doctest::Approx(want).epsilon(1e-8));
      }
  }
}

TEST_CASE("addition variant uses the reversal and matches the add FMA") {
  const int p = 3;
  const Matrix r = [] {
    Vector row = Vector::Zero(3);
    row[2] = 1.0;
    return circulant({row, BlockKind::Hankel});
  }();
  CHECK((r * r - Matrix::Identity(3, 3)).norm() < 1e-15);
  CHECK(r(0, 2) == 1.0);  // first row e_(p-1)

  const Theorem1Ensemble ens = theorem1_addition_variant(p);
  // M_0 off-diagonal block is R itself
  CHECK((ens.m[0].block(0, p, p, p) - r).norm() < 1e-15);
  const Theorem1Report rep = theorem1_verify(ens, 100, 7);
  CHECK(rep.bilinear_discrete_err < 1e-8);
  CHECK(rep.fma_discrete_err < 1e-8);
  CHECK(rep.fma_random_err < 1e-8);
}

TEST_CASE("low-rank construction is exact and rank four") {
  for (const Op op : {Op::Add, Op::Mul}) {
    const LowRankModel model = lowrank_build(11, op);
    for (const TableRow& row : make_table(ModTask(op, 11)))
      CHECK(lowrank_predict(model, row.a, row.b) == row.label);
    const Vector sv = encoder_singular_values(model, 5);
    CHECK(sv[3] > 1e-8);
    CHECK(sv[4] < 1e-10);
  }
  CHECK_THROWS_AS(lowrank_build(11, Op::Sub), std::invalid_argument);
}
