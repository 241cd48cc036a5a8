#pragma once

#include <stdexcept>
#include <string>
#include <boost/multiprecision/cpp_int.hpp>

namespace hl {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr double PI = 3.14159265358979323846264338327950288;

// Error taxonomy. Validation-type errors map to CLI exit 2, numerical ones to 3.
struct Error : std::runtime_error {
    explicit Error(const std::string& m) : std::runtime_error(m) {}
};

struct UnsupportedConfiguration : Error {
    explicit UnsupportedConfiguration(const std::string& m) : Error("unsupported configuration: " + m) {}
};
struct ValidationError : Error {
    explicit ValidationError(const std::string& m) : Error("validation: " + m) {}
};
struct MissingTableEntry : Error {
    explicit MissingTableEntry(const std::string& m) : Error("missing table entry: " + m) {}
};

struct NumericalInstability : Error {
    explicit NumericalInstability(const std::string& m) : Error("numerical instability: " + m) {}
};
struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& m) : Error("budget exceeded: " + m) {}
};
struct RejectionCapExceeded : Error {
    explicit RejectionCapExceeded(const std::string& m) : Error("rejection cap exceeded: " + m) {}
};
struct QuadratureFailure : Error {
    explicit QuadratureFailure(const std::string& m) : Error("quadrature failure: " + m) {}
};
struct ConvergenceFailure : Error {
    explicit ConvergenceFailure(const std::string& m) : Error("convergence failure: " + m) {}
};
struct NoConsistentConvention : Error {
    explicit NoConsistentConvention(const std::string& m) : Error("no consistent convention: " + m) {}
};

inline double rational_to_double(const Rational& r) {
    return static_cast<double>(r);
}

} // namespace hl
