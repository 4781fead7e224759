#include "preth/rng.hpp"

#include <cmath>
#include <numbers>

namespace preth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(splitmix64(seed_ ^ splitmix64(stream + 1)));
}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u = uniform();
  while (u == 0.0) u = uniform();
  const double v = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u));
  const double angle = 2.0 * std::numbers::pi * v;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im);
}

Vector Rng::haar_state(long dim) {
  Vector v(dim);
  for (long i = 0; i < dim; ++i) v(i) = complex_normal();
  v.normalize();
  return v;
}

Vector Rng::product_state(int sites, int local_dim) {
  Vector state = Vector::Ones(1);
  for (int s = 0; s < sites; ++s) {
    const Vector site = haar_state(local_dim);
    Vector next(state.size() * local_dim);
    for (long i = 0; i < state.size(); ++i)
      for (int a = 0; a < local_dim; ++a)
        next(i * local_dim + a) = state(i) * site(a);
    state = std::move(next);
  }
  return state;
}

Vector Rng::basis_product_state(int sites, int local_dim) {
  long index = 0;
  for (int s = 0; s < sites; ++s) {
    long b = static_cast<long>(uniform() * local_dim);
    if (b >= local_dim) b = local_dim - 1;
    index = index * local_dim + b;
  }
  long dim = 1;
  for (int s = 0; s < sites; ++s) dim *= local_dim;
  Vector state = Vector::Zero(dim);
  state(index) = 1.0;
  return state;
}

}  // namespace preth
