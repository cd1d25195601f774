#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hab {

inline double value_of(double x) { return x; }

namespace ad {

// Reverse-mode tape. Each recorded node carries at most two parents with
// precomputed local partials; the backward sweep is a single reverse pass.
// One tape per thread of execution; gradient evaluations on different
// threads use different tapes and share nothing.
class Tape {
 public:
  struct Node {
    std::int32_t p0;
    std::int32_t p1;
    double w0;
    double w1;
  };

  Tape() { nodes_.reserve(1u << 20); }

  std::int32_t leaf() {
    nodes_.push_back({-1, -1, 0.0, 0.0});
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::int32_t unary(std::int32_t p, double w) {
    nodes_.push_back({p, -1, w, 0.0});
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::int32_t binary(std::int32_t p0, double w0, std::int32_t p1, double w1) {
    nodes_.push_back({p0, p1, w0, w1});
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }

  // Propagates d(output)/d(node) for every node into `adjoint`.
  void backward(std::int32_t output, std::vector<double>& adjoint) const {
    adjoint.assign(nodes_.size(), 0.0);
    if (output < 0) return;
    adjoint[static_cast<std::size_t>(output)] = 1.0;
    for (std::int32_t i = output; i >= 0; --i) {
      const double a = adjoint[static_cast<std::size_t>(i)];
      if (a == 0.0) continue;
      const Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.p0 >= 0) adjoint[static_cast<std::size_t>(n.p0)] += n.w0 * a;
      if (n.p1 >= 0) adjoint[static_cast<std::size_t>(n.p1)] += n.w1 * a;
    }
  }

 private:
  std::vector<Node> nodes_;
};

namespace detail {
inline Tape*& active_tape_slot() {
  thread_local Tape* t = nullptr;
  return t;
}
}  // namespace detail

inline Tape* active_tape() { return detail::active_tape_slot(); }

// RAII activation of a tape on the current thread.
class TapeScope {
 public:
  explicit TapeScope(Tape& t) : prev_(detail::active_tape_slot()) {
    detail::active_tape_slot() = &t;
  }
  ~TapeScope() { detail::active_tape_slot() = prev_; }
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* prev_;
};

// Tracked scalar. A Rev with idx < 0 is a constant and records nothing.
struct Rev {
  double v = 0.0;
  std::int32_t idx = -1;

  Rev() = default;
  Rev(double value) : v(value) {}  // NOLINT: implicit constant lift
  Rev(double value, std::int32_t i) : v(value), idx(i) {}

  static Rev input(double value) {
    return Rev(value, active_tape()->leaf());
  }
};

inline double value_of(const Rev& r) { return r.v; }

inline Rev make_unary(const Rev& x, double value, double partial) {
  if (x.idx < 0) return Rev(value);
  return Rev(value, active_tape()->unary(x.idx, partial));
}

inline Rev make_binary(const Rev& a, const Rev& b, double value, double wa,
                       double wb) {
  if (a.idx < 0 && b.idx < 0) return Rev(value);
  if (b.idx < 0) return Rev(value, active_tape()->unary(a.idx, wa));
  if (a.idx < 0) return Rev(value, active_tape()->unary(b.idx, wb));
  return Rev(value, active_tape()->binary(a.idx, wa, b.idx, wb));
}

// arithmetic -----------------------------------------------------------

inline Rev operator+(const Rev& a, const Rev& b) {
  return make_binary(a, b, a.v + b.v, 1.0, 1.0);
}
inline Rev operator+(const Rev& a, double b) { return make_unary(a, a.v + b, 1.0); }
inline Rev operator+(double a, const Rev& b) { return make_unary(b, a + b.v, 1.0); }

inline Rev operator-(const Rev& a, const Rev& b) {
  return make_binary(a, b, a.v - b.v, 1.0, -1.0);
}
inline Rev operator-(const Rev& a, double b) { return make_unary(a, a.v - b, 1.0); }
inline Rev operator-(double a, const Rev& b) { return make_unary(b, a - b.v, -1.0); }
inline Rev operator-(const Rev& a) { return make_unary(a, -a.v, -1.0); }

inline Rev operator*(const Rev& a, const Rev& b) {
  return make_binary(a, b, a.v * b.v, b.v, a.v);
}
inline Rev operator*(const Rev& a, double b) { return make_unary(a, a.v * b, b); }
inline Rev operator*(double a, const Rev& b) { return make_unary(b, a * b.v, a); }

// values use the literal quotient so tracked and plain evaluations agree
// bit for bit; reciprocals appear only in the partials
inline Rev operator/(const Rev& a, const Rev& b) {
  const double q = a.v / b.v;
  const double inv = 1.0 / b.v;
  return make_binary(a, b, q, inv, -q * inv);
}
inline Rev operator/(const Rev& a, double b) {
  return make_unary(a, a.v / b, 1.0 / b);
}
inline Rev operator/(double a, const Rev& b) {
  const double q = a / b.v;
  return make_unary(b, q, -q / b.v);
}

inline Rev& operator+=(Rev& a, const Rev& b) { return a = a + b; }
inline Rev& operator+=(Rev& a, double b) { return a = a + b; }
inline Rev& operator-=(Rev& a, const Rev& b) { return a = a - b; }
inline Rev& operator-=(Rev& a, double b) { return a = a - b; }
inline Rev& operator*=(Rev& a, const Rev& b) { return a = a * b; }
inline Rev& operator*=(Rev& a, double b) { return a = a * b; }

// comparisons branch on values (subgradient chosen by the branch taken)

inline bool operator<(const Rev& a, const Rev& b) { return a.v < b.v; }
inline bool operator<(const Rev& a, double b) { return a.v < b; }
inline bool operator<(double a, const Rev& b) { return a < b.v; }
inline bool operator>(const Rev& a, const Rev& b) { return a.v > b.v; }
inline bool operator>(const Rev& a, double b) { return a.v > b; }
inline bool operator>(double a, const Rev& b) { return a > b.v; }
inline bool operator<=(const Rev& a, const Rev& b) { return a.v <= b.v; }
inline bool operator<=(const Rev& a, double b) { return a.v <= b; }
inline bool operator>=(const Rev& a, const Rev& b) { return a.v >= b.v; }
inline bool operator>=(const Rev& a, double b) { return a.v >= b; }

// elementary functions -------------------------------------------------

inline Rev sqrt(const Rev& x) {
  if (x.v == 0.0) return Rev(0.0);  // subgradient 0 at the kink
  const double s = std::sqrt(x.v);
  return make_unary(x, s, 0.5 / s);
}

inline Rev exp(const Rev& x) {
  const double e = std::exp(x.v);
  return make_unary(x, e, e);
}

inline Rev log(const Rev& x) { return make_unary(x, std::log(x.v), 1.0 / x.v); }

inline Rev sin(const Rev& x) { return make_unary(x, std::sin(x.v), std::cos(x.v)); }
inline Rev cos(const Rev& x) { return make_unary(x, std::cos(x.v), -std::sin(x.v)); }

inline Rev pow(const Rev& x, double p) {
  return make_unary(x, std::pow(x.v, p), p * std::pow(x.v, p - 1.0));
}

inline Rev abs(const Rev& x) {
  if (x.v >= 0.0) return make_unary(x, x.v, 1.0);
  return make_unary(x, -x.v, -1.0);
}

inline Rev max(const Rev& a, const Rev& b) {
  return a.v >= b.v ? make_unary(a, a.v, 1.0) : make_unary(b, b.v, 1.0);
}
inline Rev max(const Rev& a, double b) {
  return a.v >= b ? make_unary(a, a.v, 1.0) : Rev(b);
}
inline Rev min(const Rev& a, const Rev& b) {
  return a.v <= b.v ? make_unary(a, a.v, 1.0) : make_unary(b, b.v, 1.0);
}
inline Rev min(const Rev& a, double b) {
  return a.v <= b ? make_unary(a, a.v, 1.0) : Rev(b);
}

inline Rev clamp(const Rev& x, double lo, double hi) {
  if (x.v < lo) return Rev(lo);
  if (x.v > hi) return Rev(hi);
  return x;
}

inline bool isfinite(const Rev& x) { return std::isfinite(x.v); }

// Records an externally computed scalar function of x with its partial.
inline Rev lift_unary(const Rev& x, double value, double partial) {
  return make_unary(x, value, partial);
}

}  // namespace ad

// Generic helpers usable from code templated on the scalar type.

inline double lift_unary(double /*x*/, double value, double /*partial*/) {
  return value;
}

inline double clamp_value(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

}  // namespace hab
