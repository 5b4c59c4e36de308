#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "lgeo/error.hpp"
#include "lgeo/observables.hpp"
#include "oracles.hpp"

using doctest::Approx;
using lgeo::Spectrum;

TEST_SUITE("core") {

TEST_CASE("omega of equal-magnitude and 1-sparse vectors") {
  const std::vector<double> flat{1, 1, 1, 1};
  const std::vector<double> signs{1, -1, 1, -1};
  const std::vector<double> sparse{5, 0, 0, 0};
  CHECK(lgeo::omega(flat) == Approx(0.0).epsilon(1e-15));
  CHECK(lgeo::omega(signs) == Approx(0.0).epsilon(1e-15));
  CHECK(lgeo::omega(sparse) == Approx(0.5).epsilon(1e-15));
  CHECK(lgeo::omega_upper_bound(4) == Approx(0.5));
}

TEST_CASE("omega of (3, 4)") {
  const std::vector<double> h{3, 4};
  CHECK(std::abs(lgeo::omega(h) - 0.0100505063388334658) < 1e-15);
}

TEST_CASE("omega rejects zero, underflow and non-finite input") {
  CHECK_THROWS_AS(lgeo::omega(std::vector<double>{0, 0, 0}), lgeo::DomainError);
  CHECK_THROWS_AS(lgeo::omega(std::vector<double>{1e-320, 0}), lgeo::DomainError);
  CHECK_THROWS_AS(lgeo::omega(std::vector<double>{1, NAN}), lgeo::InputError);
  CHECK_THROWS_AS(lgeo::omega(std::vector<double>{1, INFINITY}), lgeo::InputError);
  CHECK_THROWS_AS(lgeo::omega(std::vector<double>{}), lgeo::InputError);
}

TEST_CASE("omega of huge entries does not overflow") {
  const std::vector<double> h{1e200, 1e200, 0, 0};
  CHECK(lgeo::omega(h) == Approx(oracle::omega({1, 1, 0, 0})).epsilon(1e-13));
}

TEST_CASE("spectrum sorts, clamps round-off and rejects negatives") {
  Spectrum s({1.0, 3.0, -1e-14});
  CHECK(s.eigenvalues() == std::vector<double>{3.0, 1.0, 0.0});
  CHECK(s.trace() == 4.0);
  CHECK(s.rank() == 2);
  CHECK_THROWS_AS(Spectrum({1.0, -0.1}), lgeo::InputError);
  CHECK_THROWS_AS(Spectrum({1.0, NAN}), lgeo::InputError);
}

TEST_CASE("zero tolerance scales with the largest eigenvalue") {
  CHECK(lgeo::eigen_zero_tolerance(0.5) == 1e-12);
  CHECK(lgeo::eigen_zero_tolerance(1e6) == Approx(1e-6));
  Spectrum s({1e6, -5e-7});
  CHECK(s[1] == 0.0);
}

TEST_CASE("spectral entropy and effective rank") {
  CHECK(lgeo::spectral_entropy(Spectrum({1, 1, 1, 1})) == Approx(std::log(4.0)));
  CHECK(lgeo::spectral_entropy(Spectrum({1, 0, 0, 0})) == 0.0);
  CHECK(std::abs(lgeo::spectral_entropy(Spectrum({3, 1})) - 0.562335144618808350) < 1e-15);
  CHECK(lgeo::effective_rank(Spectrum({1, 1, 1, 1})) == Approx(4.0));
  CHECK(lgeo::effective_rank(Spectrum({1, 0, 0, 0})) == 1.0);
  CHECK(std::abs(lgeo::effective_rank(Spectrum({3, 1})) - 1.754765350603323) < 1e-14);
}

TEST_CASE("participation ratio") {
  CHECK(lgeo::pr_dimension(Spectrum({0.3, 0.3, 0.3, 0.3, 0.3})) == Approx(5.0));
  CHECK(lgeo::pr_dimension(Spectrum({1, 0, 0})) == 1.0);
  CHECK(std::abs(lgeo::pr_dimension(Spectrum({2, 1, 1})) - 8.0 / 3.0) < 1e-15);
}

TEST_CASE("spectral observables need positive trace") {
  const Spectrum zero({0, 0});
  CHECK_THROWS_AS(lgeo::spectral_entropy(zero), lgeo::DomainError);
  CHECK_THROWS_AS(lgeo::effective_rank(zero), lgeo::DomainError);
  CHECK_THROWS_AS(lgeo::pr_dimension(zero), lgeo::DomainError);
  CHECK_THROWS_AS(lgeo::pr_dimension(Spectrum{}), lgeo::DomainError);
}

TEST_CASE("omega matches the reference formula on random vectors") {
  std::mt19937_64 rng(7);
  for (std::size_t d : {1u, 3u, 17u, 200u}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto h = oracle::random_vector(d, rng);
      CHECK(lgeo::omega(h) == Approx(oracle::omega(h)).epsilon(1e-13));
    }
  }
}

}  // TEST_SUITE
