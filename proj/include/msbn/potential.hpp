#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace msbn {

struct Variable {
  std::string id;
  std::size_t cardinality = 2;

  friend bool operator==(const Variable&, const Variable&) = default;
};

/// Ordered, duplicate-free set of variables, sorted by id.
class Scope {
 public:
  Scope() = default;
  /// Sorts by id. Throws std::invalid_argument on duplicate ids or a
  /// cardinality below 2.
  Scope(std::vector<Variable> vars);
  Scope(std::initializer_list<Variable> vars) : Scope(std::vector<Variable>(vars)) {}

  const std::vector<Variable>& vars() const { return vars_; }
  std::size_t size() const { return vars_.size(); }
  bool empty() const { return vars_.empty(); }
  std::size_t state_space() const;

  bool contains(const std::string& id) const;
  // Position of `id` in the sorted order, or size() when absent.
  std::size_t position(const std::string& id) const;
  bool is_subset_of(const Scope& other) const;
  std::vector<std::string> ids() const;

  // Set algebra. Union throws std::invalid_argument when a shared id has
  // differing cardinalities.
  Scope unite(const Scope& other) const;
  Scope intersect(const Scope& other) const;
  Scope minus(const Scope& other) const;

  std::string to_string() const;

  friend bool operator==(const Scope&, const Scope&) = default;

 private:
  std::vector<Variable> vars_;
};

/// Dense nonnegative table over a Scope. Row-major: the last variable of
/// the scope varies fastest. Tables are immutable values; the algebra
/// below returns new tables.
class PotentialTable {
 public:
  PotentialTable() : values_(1, 1.0) {}
  // Values must already be laid out in canonical (sorted scope) order.
  PotentialTable(Scope scope, std::vector<double> values);

  static PotentialTable ones(Scope scope);
  static PotentialTable zeros(Scope scope);

  const Scope& scope() const { return scope_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double total() const;

  // Decodes a flat index into per-variable states (scope order).
  std::vector<std::size_t> assignment(std::size_t index) const;
  std::string describe_cell(std::size_t index) const;

  friend bool operator==(const PotentialTable&, const PotentialTable&) = default;

 private:
  Scope scope_;
  std::vector<double> values_;
};

/// Builds a table from values laid out for `vars` in the caller's order;
/// the result has the canonical scope with values permuted accordingly.
/// Throws std::invalid_argument on length mismatch or a negative or
/// non-finite entry.
PotentialTable make_table(const std::vector<Variable>& vars, std::vector<double> values);

PotentialTable multiply(const PotentialTable& a, const PotentialTable& b);

/// Pointwise quotient with 0/0 = 0. scope(den) must be a subset of
/// scope(num). Throws InconsistentSupport for a cell with num > 0, den = 0.
PotentialTable divide(const PotentialTable& num, const PotentialTable& den);

/// Sums out every variable not in `target`. Throws std::invalid_argument
/// when target is not a subset of the table's scope.
PotentialTable marginalize(const PotentialTable& t, const Scope& target);

/// Throws std::domain_error on a table with zero total mass.
PotentialTable normalize(const PotentialTable& t);

/// Max absolute entry difference. Throws std::invalid_argument on scope mismatch.
double max_abs_diff(const PotentialTable& a, const PotentialTable& b);
bool table_equal(const PotentialTable& a, const PotentialTable& b, double tol);

}  // namespace msbn
