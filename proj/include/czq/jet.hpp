#ifndef CZQ_JET_HPP
#define CZQ_JET_HPP

// Truncated multivariate Taylor polynomials ("jets") with graded monomial order.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "czq/error.hpp"
#include "czq/special.hpp"

namespace czq {

inline constexpr int kMaxJetDegree = 24;

template <int NVars>
class MonomialTable {
 public:
  using Exponents = std::array<int, NVars>;

  static const MonomialTable& for_degree(int degree) {
    if (degree < 0 || degree > kMaxJetDegree) throw Error(Errc::domain, "jet degree out of range");
    static std::array<std::unique_ptr<MonomialTable>, kMaxJetDegree + 1> tables;
    static std::array<std::once_flag, kMaxJetDegree + 1> flags;
    std::call_once(flags[degree], [&] { tables[degree].reset(new MonomialTable(degree)); });
    return *tables[degree];
  }

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exps_.size()); }
  // Number of monomials of total degree <= d; they occupy the leading slots.
  int count_up_to(int d) const { return d < 0 ? 0 : counts_[std::min(d, degree_)]; }
  const Exponents& exponents(int i) const { return exps_[i]; }
  int total_degree(int i) const { return totals_[i]; }

  int index(const Exponents& e) const {
    int t = 0, flat = 0;
    for (int v = 0; v < NVars; ++v) {
      if (e[v] < 0) return -1;
      t += e[v];
      flat = flat * (degree_ + 1) + std::min(e[v], degree_);
    }
    return t > degree_ ? -1 : lookup_[flat];
  }

  int product_index(int i, int j) const { return prod_[std::size_t(i) * exps_.size() + j]; }

 private:
  explicit MonomialTable(int degree) : degree_(degree) {
    for (int d = 0; d <= degree; ++d) {
      enumerate(d, 0, Exponents{}, d);
      counts_.push_back(static_cast<int>(exps_.size()));
    }
    int box = 1;
    for (int v = 0; v < NVars; ++v) box *= degree + 1;
    lookup_.assign(box, -1);
    for (int i = 0; i < size(); ++i) {
      int flat = 0;
      for (int v = 0; v < NVars; ++v) flat = flat * (degree_ + 1) + exps_[i][v];
      lookup_[flat] = i;
    }
    prod_.assign(exps_.size() * exps_.size(), -1);
    for (int i = 0; i < size(); ++i)
      for (int j = 0; j < count_up_to(degree_ - totals_[i]); ++j) {
        Exponents e;
        for (int v = 0; v < NVars; ++v) e[v] = exps_[i][v] + exps_[j][v];
        prod_[std::size_t(i) * exps_.size() + j] = index(e);
      }
  }

  // Lexicographically descending in the first variable within each degree.
  void enumerate(int remaining, int var, Exponents e, int total) {
    if (var == NVars - 1) {
      e[var] = remaining;
      exps_.push_back(e);
      totals_.push_back(total);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      e[var] = k;
      enumerate(remaining - k, var + 1, e, total);
    }
  }

  int degree_;
  std::vector<Exponents> exps_;
  std::vector<int> totals_;
  std::vector<int> counts_;
  std::vector<int> lookup_;
  std::vector<int> prod_;
};

template <class T, int NVars>
class Jet {
 public:
  using Table = MonomialTable<NVars>;
  using Exponents = typename Table::Exponents;

  Jet() : Jet(0) {}
  explicit Jet(int degree, T value = T{})
      : table_(&Table::for_degree(degree)), c_(table_->size(), T{}) {
    c_[0] = value;
  }

  static Jet variable(int degree, int var, T value) {
    Jet j(degree, value);
    if (degree >= 1) {
      Exponents e{};
      e[var] = 1;
      j.c_[j.table_->index(e)] = T(1);
    }
    return j;
  }

  int degree() const { return table_->degree(); }
  int size() const { return table_->size(); }
  const Table& table() const { return *table_; }
  T value() const { return c_[0]; }
  T& operator[](int i) { return c_[i]; }
  const T& operator[](int i) const { return c_[i]; }
  std::span<const T> coefficients() const { return c_; }

  T coefficient(const Exponents& e) const {
    const int i = table_->index(e);
    return i < 0 ? T{} : c_[i];
  }

  Jet truncated(int degree) const {
    Jet r(std::min(degree, this->degree()));
    std::copy_n(c_.begin(), r.size(), r.c_.begin());  // graded order: a prefix
    return r;
  }

  // Part of exact total degree d.
  Jet homogeneous_part(int d) const {
    Jet r(degree());
    for (int i = table_->count_up_to(d - 1); i < table_->count_up_to(d); ++i) r.c_[i] = c_[i];
    return r;
  }

  Jet derivative(int var) const {
    Jet r(std::max(degree() - 1, 0));
    if (degree() == 0) return r;
    for (int i = 0; i < r.size(); ++i) {
      Exponents e = r.table_->exponents(i);
      e[var] += 1;
      r.c_[i] = double(e[var]) * c_[table_->index(e)];
    }
    return r;
  }

  Jet& operator+=(const Jet& o) { return combine(o, 1.0); }
  Jet& operator-=(const Jet& o) { return combine(o, -1.0); }
  Jet& operator+=(const T& a) { c_[0] += a; return *this; }
  Jet& operator-=(const T& a) { c_[0] -= a; return *this; }
  Jet& operator*=(const T& a) {
    for (auto& x : c_) x *= a;
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, const T& b) { return a += b; }
  friend Jet operator+(const T& b, Jet a) { return a += b; }
  friend Jet operator-(Jet a, const T& b) { return a -= b; }
  friend Jet operator-(const T& b, const Jet& a) { return (-a) += b; }
  friend Jet operator*(Jet a, const T& b) { return a *= b; }
  friend Jet operator*(const T& b, Jet a) { return a *= b; }
  friend Jet operator/(Jet a, const T& b) { return a *= T(1) / b; }
  friend Jet operator-(Jet a) { return a *= T(-1); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    const Jet& lo = a.degree() <= b.degree() ? a : b;
    Jet r(lo.degree());
    const Table& t = *r.table_;
    const int d = r.degree();
    // Graded order makes low-degree slots coincide across tables, so operands
    // of higher degree can be indexed directly.
    for (int i = 0; i < t.size(); ++i) {
      const T ai = a.c_[i];
      if (ai == T{}) continue;
      const int lim = t.count_up_to(d - t.total_degree(i));
      for (int j = 0; j < lim; ++j) r.c_[t.product_index(i, j)] += ai * b.c_[j];
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

 private:
  Jet& combine(const Jet& o, double sign) {
    if (o.degree() < degree()) *this = truncated(o.degree());
    for (int i = 0; i < size(); ++i) c_[i] += sign * o.c_[i];
    return *this;
  }

  const Table* table_;
  std::vector<T> c_;
};

// f(u) where f(u0 + t) = sum_n a[n] t^n; entries of a beyond the jet degree are ignored.
template <class T, int N, class Coef>
Jet<T, N> compose(const Jet<T, N>& u, const std::vector<Coef>& a) {
  const int d = u.degree();
  Jet<T, N> t = u;
  t[0] = T{};
  const int top = std::min<int>(d, static_cast<int>(a.size()) - 1);
  Jet<T, N> r(d, T(a[top]));
  for (int n = top - 1; n >= 0; --n) {
    r = r * t;
    r[0] += T(a[n]);
  }
  return r;
}

namespace detail {

template <class T>
std::vector<T> pow_series(T x0, T mu, int order) {
  // binom(mu, n) x0^{mu - n}, principal branch for x0^mu.
  std::vector<T> a(order + 1);
  const T base = std::pow(x0, mu);
  const T inv = T(1) / x0;
  T coef = T(1), p = base;
  for (int n = 0; n <= order; ++n) {
    a[n] = coef * p;
    coef *= (mu - T(double(n))) / T(double(n + 1));
    p *= inv;
  }
  return a;
}

}  // namespace detail

template <class T, int N>
Jet<T, N> exp(const Jet<T, N>& u) {
  std::vector<T> a(u.degree() + 1);
  T v = std::exp(u.value());
  for (int n = 0; n <= u.degree(); ++n) {
    a[n] = v;
    v /= double(n + 1);
  }
  return compose(u, a);
}

template <class T, int N>
Jet<T, N> sin(const Jet<T, N>& u) {
  std::vector<T> a(u.degree() + 1);
  const T s = std::sin(u.value()), c = std::cos(u.value());
  const T cyc[4] = {s, c, -s, -c};
  double f = 1.0;
  for (int n = 0; n <= u.degree(); ++n) {
    a[n] = cyc[n % 4] / f;
    f *= double(n + 1);
  }
  return compose(u, a);
}

template <class T, int N>
Jet<T, N> cos(const Jet<T, N>& u) {
  std::vector<T> a(u.degree() + 1);
  const T s = std::sin(u.value()), c = std::cos(u.value());
  const T cyc[4] = {c, -s, -c, s};
  double f = 1.0;
  for (int n = 0; n <= u.degree(); ++n) {
    a[n] = cyc[n % 4] / f;
    f *= double(n + 1);
  }
  return compose(u, a);
}

template <class T, int N>
Jet<T, N> pow(const Jet<T, N>& u, T mu) {
  return compose(u, detail::pow_series(u.value(), mu, u.degree()));
}

template <class T, int N>
Jet<T, N> sqrt(const Jet<T, N>& u) {
  return pow(u, T(0.5));
}

template <class T, int N>
Jet<T, N> reciprocal(const Jet<T, N>& u) {
  std::vector<T> a(u.degree() + 1);
  const T inv = T(1) / u.value();
  T p = inv;
  for (int n = 0; n <= u.degree(); ++n) {
    a[n] = p;
    p *= -inv;
  }
  return compose(u, a);
}

// phi(u) for a jet with real constant term.
template <class T, int N>
Jet<T, N> phi(const Jet<T, N>& u) {
  const std::vector<double> a = phi_taylor(std::real(u.value()), u.degree());
  return compose(u, a);
}

template <int N>
using CJet = Jet<cplx, N>;

}  // namespace czq

#endif
