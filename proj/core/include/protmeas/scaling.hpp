#pragma once

// Measurement counts and time budgets for full state reconstruction of N
// qubits. Counts are exact big integers.

#include <boost/multiprecision/cpp_int.hpp>

namespace protmeas {

using BigInt = boost::multiprecision::cpp_int;

/// Age of the universe in seconds; override per call where needed.
inline constexpr double kAgeOfUniverseSeconds = 4.35e17;

/// General states: 4^N - 1. Pure states: round(c_pure * 2^N).
BigInt observable_count(int n_qubits, bool assume_pure = false, double c_pure = 1.0);

struct TimeBudget {
  double total_seconds = 0.0;
  double age_universe_ratio = 0.0;
  double orders_of_magnitude = 0.0;  // log10 of the ratio
};

TimeBudget time_budget(const BigInt& count, double seconds_per_measurement,
                       double age_seconds = kAgeOfUniverseSeconds);

double per_measurement_time(double total_seconds, const BigInt& count);

/// log10 of a positive big integer, accurate far beyond double range.
double log10_big(const BigInt& value);

struct ScalingReport {
  int n_qubits = 1;
  BigInt dim;            // 2^N
  BigInt count_general;  // 4^N - 1
  BigInt count_pure;     // round(c_pure 2^N)
  bool assume_pure = false;
  double c_pure = 1.0;
  double seconds_per_measurement = 0.0;
  /// Budget for the count selected by assume_pure.
  TimeBudget budget;
};

ScalingReport scaling_report(int n_qubits, double seconds_per_measurement, bool assume_pure = false,
                             double c_pure = 1.0, double age_seconds = kAgeOfUniverseSeconds);

}  // namespace protmeas
