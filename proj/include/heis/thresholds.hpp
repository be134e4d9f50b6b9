#pragma once

// Pass/fail thresholds of the experiment harness. Every report echoes this
// table together with kVersion; bump the version whenever a value changes.

namespace heis::thresholds {

inline constexpr const char* kVersion = "1";

// Group and metric identities.
inline constexpr double kAssociativity = 1e-9;     // times max(1, |coords|)
inline constexpr double kLeftInvariance = 1e-9;    // relative to d(a, b)
inline constexpr double kHomogeneity = 1e-12;      // relative to r |a|
inline constexpr double kDilationHom = 1e-9;       // relative, componentwise
inline constexpr double kGaugeSymmetry = 1e-12;    // relative
inline constexpr double kTriangleSlack = 1e-12;    // absolute, times (1 + rhs)
inline constexpr double kInverse = 1e-12;          // times max(1, |coords|)

// Split and projections.
inline constexpr double kSplitRoundTrip = 1e-9;    // relative
inline constexpr double kLipschitzGrowth = 0.05;   // sup(10N) / sup(N) - 1
inline constexpr double kHeisRatioGrowth = 3.0;    // ratio(1e-4) / ratio(1e-2)
inline constexpr double kDeltaCoarse = 1e-2;
inline constexpr double kDeltaFine = 1e-4;

// Tubes lemma.
inline constexpr double kTubeFactor = 8.0;         // |t1 - t2| <= 8 r^2
inline constexpr double kMinNonVacuous = 0.10;     // fraction of trials
inline constexpr double kThetaMargin = 0.5;        // |pi_t theta| - |2 w(...)| >= 1/2

// Dimension estimates.
inline constexpr double kDimTol = 0.15;
inline constexpr double kDimTolTwo = 0.2;

// Construction.
inline constexpr double kCountFactor = 4.0;        // ball counts within x4 of 4^m sigma^-2m
inline constexpr double kSobolevRatioLo = 0.1;
inline constexpr double kSobolevRatioHi = 10.0;
inline constexpr double kMcConsistency = 0.05;     // doubling MC samples
// Packing bound 5^Q (Q = 4) times the four sibling columns a point can see.
inline constexpr double kOverlapBound = 2500.0;

// Distortion experiment.
inline constexpr double kImageDimMedian = 1.05;
inline constexpr double kRieszOffset = 0.15;       // energy exponent alpha - 0.15
inline constexpr int kEstimatorLevels = 12;
inline constexpr double kEstimatorTopFraction = 0.25;  // r_max = diameter / 4
inline constexpr double kEstimatorSpacingFactor = 4.0; // r_min = 4 x median spacing

}  // namespace heis::thresholds
