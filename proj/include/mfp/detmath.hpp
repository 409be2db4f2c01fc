#pragma once

// Portable elementary functions built only from IEEE-754 +, -, *, / and
// exact power-of-two scaling, so results are bit-identical on every
// conforming platform regardless of the C library in use. Accuracy is
// within a few ulp of the correctly rounded result.

namespace mfp::detmath {

double exp(double x);

// Natural log; x must be > 0 (returns -inf for 0, NaN for negative).
double log(double x);

// base^e for base >= 0.
double pow(double base, double e);

double logistic(double z);
double logit(double p);

}  // namespace mfp::detmath
