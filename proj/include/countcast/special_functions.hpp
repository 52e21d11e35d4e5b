#pragma once

namespace countcast {

// Digamma psi(x), x > 0. Throws std::domain_error otherwise.
double digamma(double x);

// Trigamma psi'(x), x > 0. Strictly positive.
double trigamma(double x);

// Tetragamma psi''(x), x > 0. Used by the Newton solvers' Jacobians.
double tetragamma(double x);

}  // namespace countcast
