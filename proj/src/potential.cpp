#include "msbn/potential.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "msbn/error.hpp"

namespace msbn {

// ---------------------------------------------------------------------------
// Scope

Scope::Scope(std::vector<Variable> vars) : vars_(std::move(vars)) {
  std::sort(vars_.begin(), vars_.end(),
            [](const Variable& a, const Variable& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].cardinality < 2)
      throw std::invalid_argument("variable '" + vars_[i].id + "' has cardinality < 2");
    if (i > 0 && vars_[i].id == vars_[i - 1].id)
      throw std::invalid_argument("duplicate variable '" + vars_[i].id + "' in scope");
  }
}

std::size_t Scope::state_space() const {
  std::size_t n = 1;
  for (const auto& v : vars_) n *= v.cardinality;
  return n;
}

std::size_t Scope::position(const std::string& id) const {
  auto it = std::lower_bound(vars_.begin(), vars_.end(), id,
                             [](const Variable& v, const std::string& key) { return v.id < key; });
  if (it == vars_.end() || it->id != id) return vars_.size();
  return static_cast<std::size_t>(it - vars_.begin());
}

bool Scope::contains(const std::string& id) const { return position(id) < vars_.size(); }

bool Scope::is_subset_of(const Scope& other) const {
  for (const auto& v : vars_) {
    const auto p = other.position(v.id);
    if (p == other.size() || other.vars_[p].cardinality != v.cardinality) return false;
  }
  return true;
}

std::vector<std::string> Scope::ids() const {
  std::vector<std::string> out;
  out.reserve(vars_.size());
  for (const auto& v : vars_) out.push_back(v.id);
  return out;
}

Scope Scope::unite(const Scope& other) const {
  std::vector<Variable> out = vars_;
  for (const auto& v : other.vars_) {
    const auto p = position(v.id);
    if (p == size()) {
      out.push_back(v);
    } else if (vars_[p].cardinality != v.cardinality) {
      throw std::invalid_argument("variable '" + v.id + "' has conflicting cardinalities " +
                                  std::to_string(vars_[p].cardinality) + " and " +
                                  std::to_string(v.cardinality));
    }
  }
  return Scope(std::move(out));
}

Scope Scope::intersect(const Scope& other) const {
  std::vector<Variable> out;
  for (const auto& v : vars_)
    if (other.contains(v.id)) out.push_back(v);
  return Scope(std::move(out));
}

Scope Scope::minus(const Scope& other) const {
  std::vector<Variable> out;
  for (const auto& v : vars_)
    if (!other.contains(v.id)) out.push_back(v);
  return Scope(std::move(out));
}

std::string Scope::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (i) s += ",";
    s += vars_[i].id;
  }
  return s + "}";
}

// ---------------------------------------------------------------------------
// PotentialTable

namespace {

void check_entries(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw std::invalid_argument("non-finite entry at index " + std::to_string(i));
    if (values[i] < 0.0)
      throw std::invalid_argument("negative entry at index " + std::to_string(i));
  }
}

std::vector<std::size_t> row_major_strides(const Scope& s) {
  std::vector<std::size_t> strides(s.size());
  std::size_t stride = 1;
  for (std::size_t k = s.size(); k-- > 0;) {
    strides[k] = stride;
    stride *= s.vars()[k].cardinality;
  }
  return strides;
}

// Strides of `sub` laid out along the positions of `full`; zero where the
// full-scope variable is absent from sub (broadcast axis).
std::vector<std::size_t> embedded_strides(const Scope& full, const Scope& sub) {
  const auto sub_strides = row_major_strides(sub);
  std::vector<std::size_t> out(full.size(), 0);
  for (std::size_t k = 0; k < full.size(); ++k) {
    const auto p = sub.position(full.vars()[k].id);
    if (p < sub.size()) out[k] = sub_strides[p];
  }
  return out;
}

// Visits every cell of `full` in row-major order, handing the callback the
// flat index and the matching offsets into each embedded operand.
template <std::size_t N, typename F>
void for_each_cell(const Scope& full, const std::array<std::vector<std::size_t>, N>& strides,
                   F&& fn) {
  const std::size_t n = full.state_space();
  const std::size_t d = full.size();
  std::vector<std::size_t> state(d, 0);
  std::array<std::size_t, N> offset{};
  for (std::size_t cell = 0; cell < n; ++cell) {
    fn(cell, offset);
    for (std::size_t k = d; k-- > 0;) {
      const std::size_t card = full.vars()[k].cardinality;
      if (++state[k] < card) {
        for (std::size_t op = 0; op < N; ++op) offset[op] += strides[op][k];
        break;
      }
      state[k] = 0;
      for (std::size_t op = 0; op < N; ++op) offset[op] -= strides[op][k] * (card - 1);
    }
  }
}

}  // namespace

PotentialTable::PotentialTable(Scope scope, std::vector<double> values)
    : scope_(std::move(scope)), values_(std::move(values)) {
  if (values_.size() != scope_.state_space())
    throw std::invalid_argument("length mismatch: scope " + scope_.to_string() + " needs " +
                                std::to_string(scope_.state_space()) + " values, got " +
                                std::to_string(values_.size()));
  check_entries(values_);
}

PotentialTable PotentialTable::ones(Scope scope) {
  const auto n = scope.state_space();
  return PotentialTable(std::move(scope), std::vector<double>(n, 1.0));
}

PotentialTable PotentialTable::zeros(Scope scope) {
  const auto n = scope.state_space();
  return PotentialTable(std::move(scope), std::vector<double>(n, 0.0));
}

double PotentialTable::total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

std::vector<std::size_t> PotentialTable::assignment(std::size_t index) const {
  std::vector<std::size_t> states(scope_.size());
  for (std::size_t k = scope_.size(); k-- > 0;) {
    const auto card = scope_.vars()[k].cardinality;
    states[k] = index % card;
    index /= card;
  }
  return states;
}

std::string PotentialTable::describe_cell(std::size_t index) const {
  const auto states = assignment(index);
  std::ostringstream os;
  os << "cell " << index << " (";
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (k) os << ",";
    os << scope_.vars()[k].id << "=" << states[k];
  }
  os << ")";
  return os.str();
}

PotentialTable make_table(const std::vector<Variable>& vars, std::vector<double> values) {
  Scope canonical(vars);
  if (values.size() != canonical.state_space())
    throw std::invalid_argument("length mismatch: scope " + canonical.to_string() + " needs " +
                                std::to_string(canonical.state_space()) + " values, got " +
                                std::to_string(values.size()));
  check_entries(values);

  bool already_sorted = true;
  for (std::size_t k = 0; k < vars.size(); ++k)
    if (vars[k].id != canonical.vars()[k].id) already_sorted = false;
  if (already_sorted) return PotentialTable(std::move(canonical), std::move(values));

  // The caller's layout is a table over the same variables in another axis
  // order; walk the canonical cells and gather from the caller's offsets.
  std::vector<std::size_t> caller_strides(vars.size());
  std::size_t stride = 1;
  for (std::size_t k = vars.size(); k-- > 0;) {
    caller_strides[k] = stride;
    stride *= vars[k].cardinality;
  }
  std::array<std::vector<std::size_t>, 1> strides{std::vector<std::size_t>(canonical.size())};
  for (std::size_t k = 0; k < vars.size(); ++k) strides[0][canonical.position(vars[k].id)] = caller_strides[k];

  std::vector<double> out(values.size());
  for_each_cell<1>(canonical, strides,
                   [&](std::size_t cell, const std::array<std::size_t, 1>& off) { out[cell] = values[off[0]]; });
  return PotentialTable(std::move(canonical), std::move(out));
}

PotentialTable multiply(const PotentialTable& a, const PotentialTable& b) {
  Scope full = a.scope().unite(b.scope());
  std::array<std::vector<std::size_t>, 2> strides{embedded_strides(full, a.scope()),
                                                  embedded_strides(full, b.scope())};
  std::vector<double> out(full.state_space());
  const auto av = a.values();
  const auto bv = b.values();
  for_each_cell<2>(full, strides, [&](std::size_t cell, const std::array<std::size_t, 2>& off) {
    out[cell] = av[off[0]] * bv[off[1]];
  });
  return PotentialTable(std::move(full), std::move(out));
}

PotentialTable divide(const PotentialTable& num, const PotentialTable& den) {
  if (!den.scope().is_subset_of(num.scope()))
    throw std::invalid_argument("divide: denominator scope " + den.scope().to_string() +
                                " is not a subset of " + num.scope().to_string());
  const Scope& full = num.scope();
  std::array<std::vector<std::size_t>, 1> strides{embedded_strides(full, den.scope())};
  std::vector<double> out(full.state_space());
  const auto nv = num.values();
  const auto dv = den.values();
  for_each_cell<1>(full, strides, [&](std::size_t cell, const std::array<std::size_t, 1>& off) {
    const double d = dv[off[0]];
    if (d == 0.0) {
      if (nv[cell] > 0.0)
        throw InconsistentSupport(cell, "inconsistent support: positive numerator over zero at " +
                                            num.describe_cell(cell));
      out[cell] = 0.0;
    } else {
      out[cell] = nv[cell] / d;
    }
  });
  return PotentialTable(full, std::move(out));
}

PotentialTable marginalize(const PotentialTable& t, const Scope& target) {
  if (!target.is_subset_of(t.scope()))
    throw std::invalid_argument("marginalize: target " + target.to_string() +
                                " is not a subset of " + t.scope().to_string());
  if (target.size() == t.scope().size()) return t;
  std::array<std::vector<std::size_t>, 1> strides{embedded_strides(t.scope(), target)};
  std::vector<double> out(target.state_space(), 0.0);
  const auto tv = t.values();
  for_each_cell<1>(t.scope(), strides,
                   [&](std::size_t cell, const std::array<std::size_t, 1>& off) { out[off[0]] += tv[cell]; });
  return PotentialTable(target, std::move(out));
}

PotentialTable normalize(const PotentialTable& t) {
  const double mass = t.total();
  if (!(mass > 0.0)) throw std::domain_error("normalize: table " + t.scope().to_string() + " has zero mass");
  std::vector<double> out(t.values().begin(), t.values().end());
  for (auto& v : out) v /= mass;
  return PotentialTable(t.scope(), std::move(out));
}

double max_abs_diff(const PotentialTable& a, const PotentialTable& b) {
  if (!(a.scope() == b.scope()))
    throw std::invalid_argument("scope mismatch: " + a.scope().to_string() + " vs " +
                                b.scope().to_string());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

bool table_equal(const PotentialTable& a, const PotentialTable& b, double tol) {
  return max_abs_diff(a, b) <= tol;
}

}  // namespace msbn
