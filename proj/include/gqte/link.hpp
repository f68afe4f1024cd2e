#pragma once

#include <cmath>
#include <string>

#include "gqte/errors.hpp"

namespace gqte {

// Monotone transform h applied to the quantile ratio Q1(p)/Q2(p), so the
// smoother models h(Q1/Q2) = X(p) beta.
class LinkFunction {
 public:
  enum class Kind { Identity, Log };

  explicit LinkFunction(Kind kind) : kind_(kind) {}
  static LinkFunction identity() { return LinkFunction(Kind::Identity); }
  static LinkFunction log() { return LinkFunction(Kind::Log); }

  Kind kind() const noexcept { return kind_; }
  const char* name() const noexcept { return kind_ == Kind::Identity ? "identity" : "log"; }

  static LinkFunction from_name(const std::string& name) {
    if (name == "identity") return identity();
    if (name == "log") return log();
    throw InputError("unknown link '" + name + "'");
  }

  double apply(double x) const {  // h
    if (kind_ == Kind::Identity) return x;
    if (!(x > 0.0)) throw DomainError("log link: ratio must be positive");
    return std::log(x);
  }
  double inverse(double v) const {  // h^{-1}
    return kind_ == Kind::Identity ? v : std::exp(v);
  }
  double inverse_deriv(double v) const {  // d h^{-1} / dv
    return kind_ == Kind::Identity ? 1.0 : std::exp(v);
  }

 private:
  Kind kind_;
};

}  // namespace gqte
