#include "protmeas/scaling.hpp"

#include <cmath>
#include <sstream>

#include "protmeas/errors.hpp"

namespace protmeas {

namespace {

BigInt pow2(int n) { return BigInt(1) << n; }

void require_qubits(int n) {
  if (n < 1) {
    throw ConfigurationError("observable_count: N = " + std::to_string(n) + " must be >= 1");
  }
}

}  // namespace

double log10_big(const BigInt& value) {
  if (value <= 0) {
    throw ConfigurationError("log10_big: value must be positive");
  }
  // Keep the top 53 bits and account for the rest as a power of two.
  const auto bits = static_cast<long>(boost::multiprecision::msb(value)) + 1;
  const long shift = bits > 60 ? bits - 60 : 0;
  const BigInt top = value >> shift;
  return std::log10(top.convert_to<double>()) + static_cast<double>(shift) * std::log10(2.0);
}

BigInt observable_count(int n_qubits, bool assume_pure, double c_pure) {
  require_qubits(n_qubits);
  if (!assume_pure) {
    return pow2(2 * n_qubits) - 1;
  }
  if (!(c_pure > 0.0) || !std::isfinite(c_pure)) {
    std::ostringstream os;
    os << "observable_count: c_pure = " << c_pure << " must be positive";
    throw ConfigurationError(os.str());
  }
  // round(c * 2^N): scale the mantissa of c exactly, then round half up.
  int exp = 0;
  const double mant = std::frexp(c_pure, &exp);  // c = mant * 2^exp, mant in [0.5, 1)
  const auto m53 = static_cast<long long>(std::ldexp(mant, 53));
  const int total_shift = n_qubits + exp - 53;
  BigInt m(m53);
  if (total_shift >= 0) {
    return m << total_shift;
  }
  const int down = -total_shift;
  if (down > 60) {
    return BigInt(0);
  }
  return (m + (BigInt(1) << (down - 1))) >> down;
}

TimeBudget time_budget(const BigInt& count, double seconds_per_measurement, double age_seconds) {
  if (count < 1) {
    throw ConfigurationError("time_budget: count must be >= 1");
  }
  if (!(seconds_per_measurement > 0.0) || !(age_seconds > 0.0)) {
    throw ConfigurationError("time_budget: durations must be positive");
  }
  const double orders =
      log10_big(count) + std::log10(seconds_per_measurement) - std::log10(age_seconds);
  return TimeBudget{
      .total_seconds = count.convert_to<double>() * seconds_per_measurement,
      .age_universe_ratio = std::pow(10.0, orders),
      .orders_of_magnitude = orders,
  };
}

double per_measurement_time(double total_seconds, const BigInt& count) {
  if (count < 1) {
    throw ConfigurationError("per_measurement_time: count must be >= 1");
  }
  return total_seconds / count.convert_to<double>();
}

ScalingReport scaling_report(int n_qubits, double seconds_per_measurement, bool assume_pure,
                             double c_pure, double age_seconds) {
  ScalingReport r;
  r.n_qubits = n_qubits;
  r.dim = pow2(n_qubits);
  r.count_general = observable_count(n_qubits, false);
  r.count_pure = observable_count(n_qubits, true, c_pure);
  r.assume_pure = assume_pure;
  r.c_pure = c_pure;
  r.seconds_per_measurement = seconds_per_measurement;
  r.budget = time_budget(assume_pure ? r.count_pure : r.count_general, seconds_per_measurement,
                         age_seconds);
  return r;
}

}  // namespace protmeas
