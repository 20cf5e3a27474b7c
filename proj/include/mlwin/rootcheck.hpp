#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mlwin/fft.hpp"
#include "mlwin/window.hpp"

namespace mlwin {

enum class RootMethod { canonical, numeric, both };

struct Witness {
  cplx root;
  double modulus;
};

struct PalindromeTestReport {
  bool is_palindromic = false;
  // Unit-circle factors stripped before testing, highest degree first:
  // {1, 1} = x + 1, {1, -1} = x - 1, {1, 0, -1} = x^2 - 1.
  std::vector<std::vector<double>> degree_reductions;
  bool all_on_circle = false;
  // Some m fell in the tolerance band around 0 or infinity; all_on_circle is
  // then false but should not be read as a verdict.
  bool indeterminate = false;
  RootMethod method = RootMethod::canonical;
  std::vector<Witness> witnesses;   // numeric method, sorted by modulus
  std::vector<double> m_sequence;   // canonical method, m_{2K-1}, m_{2K-2}, ...
  std::optional<std::size_t> failing_step;  // n at which the recursion stopped
  std::optional<bool> canonical_verdict;
  std::optional<bool> numeric_verdict;
  double max_deviation = 0;  // numeric: max | |z| - 1 |
};

struct ReducedPalindrome {
  std::vector<double> core;
  std::vector<std::vector<double>> removed;
};

// Strip (x+1), (x-1) or (x^2-1) so that an odd-degree or anti-palindromic
// input becomes an even-degree palindromic one.
ReducedPalindrome reduce_palindrome(std::span<const double> coeffs);

PalindromeTestReport unit_circle_test_canonical(std::span<const double> coeffs,
                                                double q = 2.0, double tol = 1e-9);
PalindromeTestReport unit_circle_test_numeric(std::span<const double> coeffs,
                                              double tol_circle = 1e-6);
// Runs both methods; all_on_circle is the canonical verdict unless the
// canonical run was indeterminate, in which case the numeric one is used.
PalindromeTestReport unit_circle_test_both(std::span<const double> coeffs, double q = 2.0,
                                           double tol = 1e-9, double tol_circle = 1e-6);

// Window taps with exact zeros stripped from both ends, tested by `method`.
PalindromeTestReport check_window_roots(const Window& w, RootMethod method, double q = 2.0,
                                        double tol = 1e-9, double tol_circle = 1e-6);

}  // namespace mlwin
