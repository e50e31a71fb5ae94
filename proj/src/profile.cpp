#include "htype/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "htype/common.hpp"

namespace htype {

SpectralProfile::SpectralProfile(Family f, double a, double b, double g)
    : family_(f), alpha_(a), beta_(b), gamma_(g) {
  for (double v : {a, b, g}) {
    if (!(v > 0) || !std::isfinite(v)) throw DomainError("profile parameters must be positive");
  }
}

SpectralProfile SpectralProfile::sum(double a, double b) { return {Family::Sum, a, b, 1.0}; }
SpectralProfile SpectralProfile::power(double a, double b, double g) { return {Family::Power, a, b, g}; }
SpectralProfile SpectralProfile::inverse_power(double a, double b, double g) {
  return {Family::InversePower, a, b, g};
}
SpectralProfile SpectralProfile::resolvent() { return {Family::Resolvent, 1.0, 1.0, 1.0}; }
SpectralProfile SpectralProfile::shifted(double a, double b, double g) {
  return {Family::Shifted, a, b, g};
}
SpectralProfile SpectralProfile::xi() { return {Family::Xi, 1.0, 1.0, 1.0}; }
SpectralProfile SpectralProfile::delta() { return {Family::Delta, 1.0, 1.0, 1.0}; }

namespace {

const std::map<std::string, SpectralProfile::Family>& family_names() {
  using F = SpectralProfile::Family;
  static const std::map<std::string, F> names = {
      {"sum", F::Sum},         {"power", F::Power}, {"inverse_power", F::InversePower},
      {"resolvent", F::Resolvent}, {"shifted", F::Shifted}, {"xi", F::Xi},
      {"delta", F::Delta}};
  return names;
}

std::vector<std::string> required_keys(SpectralProfile::Family f) {
  using F = SpectralProfile::Family;
  switch (f) {
    case F::Sum:
      return {"alpha", "beta"};
    case F::Power:
    case F::InversePower:
    case F::Shifted:
      return {"alpha", "beta", "gamma"};
    default:
      return {};
  }
}

// Shortest text that round-trips to the same double.
std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

SpectralProfile SpectralProfile::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const auto it = family_names().find(name);
  if (it == family_names().end()) throw ParseError("unknown profile family '" + name + "'");
  const Family fam = it->second;
  std::map<std::string, double> params;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ParseError("profile parameter '" + item + "' lacks '='");
      const std::string key = item.substr(0, eq);
      const std::string val = item.substr(eq + 1);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(val, &used);
      } catch (const std::exception&) {
        throw ParseError("profile parameter '" + key + "' is not a number");
      }
      if (used != val.size()) throw ParseError("trailing characters in '" + item + "'");
      if (params.count(key)) throw ParseError("duplicate profile parameter '" + key + "'");
      params[key] = v;
    }
  }
  const auto keys = required_keys(fam);
  for (const auto& [key, v] : params) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ParseError("parameter '" + key + "' does not apply to profile '" + name + "'");
    }
    if (!(v > 0) || !std::isfinite(v)) throw ParseError("parameter '" + key + "' must be positive");
  }
  for (const auto& key : keys) {
    if (!params.count(key)) throw ParseError("profile '" + name + "' needs '" + key + "'");
  }
  auto get = [&](const char* k) { return params.count(k) ? params[k] : 1.0; };
  return SpectralProfile(fam, get("alpha"), get("beta"), get("gamma"));
}

std::string SpectralProfile::to_string() const {
  std::string name;
  for (const auto& [k, f] : family_names()) {
    if (f == family_) name = k;
  }
  const auto keys = required_keys(family_);
  if (keys.empty()) return name;
  std::string out = name + ":alpha=" + format_number(alpha_) + ",beta=" + format_number(beta_);
  if (keys.size() == 3) out += ",gamma=" + format_number(gamma_);
  return out;
}

double SpectralProfile::lower() const { return 0.0; }

double SpectralProfile::upper() const {
  return (family_ == Family::Resolvent || family_ == Family::Shifted)
             ? 1.0
             : std::numeric_limits<double>::infinity();
}

bool SpectralProfile::increasing() const {
  return !(family_ == Family::InversePower || family_ == Family::Resolvent ||
           family_ == Family::Shifted);
}

bool SpectralProfile::has_eta() const {
  return !(family_ == Family::Xi || family_ == Family::Resolvent);
}

double SpectralProfile::xi_power() const {
  return (family_ == Family::Xi || family_ == Family::Resolvent || family_ == Family::Delta)
             ? 1.0
             : alpha_;
}

double SpectralProfile::eta_power() const { return family_ == Family::Delta ? 1.0 : beta_; }

double SpectralProfile::operator()(double xi, double eta) const {
  const double inner = std::pow(xi, xi_power()) + (has_eta() ? std::pow(eta, eta_power()) : 0.0);
  switch (family_) {
    case Family::Sum:
    case Family::Xi:
    case Family::Delta:
      return inner;
    case Family::Power:
      return std::pow(inner, gamma_);
    case Family::InversePower:
      return std::pow(inner, -gamma_);
    case Family::Resolvent:
      return 1.0 / (1.0 + inner);
    case Family::Shifted:
      return std::pow(1.0 + inner, -gamma_);
  }
  return 0.0;
}

namespace {

// Target value nu of the inner function and d nu / d mu.
std::pair<double, double> inner_target(const SpectralProfile& h, double mu) {
  using F = SpectralProfile::Family;
  const double g = h.gamma();
  switch (h.family()) {
    case F::Sum:
    case F::Xi:
    case F::Delta:
      return {mu, 1.0};
    case F::Power:
      return {std::pow(mu, 1.0 / g), std::pow(mu, 1.0 / g - 1.0) / g};
    case F::InversePower:
      return {std::pow(mu, -1.0 / g), -std::pow(mu, -1.0 / g - 1.0) / g};
    case F::Resolvent:
      return {(1.0 - mu) / mu, -1.0 / (mu * mu)};
    case F::Shifted:
      // mu^{-1/g} - 1 without cancellation for mu near 1
      return {std::expm1(-std::log(mu) / g), -std::pow(mu, -1.0 / g - 1.0) / g};
  }
  return {0.0, 0.0};
}

// log of s^a lambda^a + lambda^{2b} at lambda = exp(u), and its u-derivative.
std::pair<double, double> log_inner(double u, double log_s, double a, double two_b) {
  const double p = a * (log_s + u);
  const double q = two_b * u;
  const double m = std::max(p, q);
  const double ep = std::exp(p - m);
  const double eq = std::exp(q - m);
  return {m + std::log(ep + eq), (a * ep + two_b * eq) / (ep + eq)};
}

}  // namespace

LambdaSolution lambda_solve_at(const SpectralProfile& h, double s, double mu, double guess) {
  if (std::isnan(mu) || !h.contains(mu)) {
    throw DomainError("mu = " + std::to_string(mu) + " lies outside the profile's spectrum (" +
                      std::to_string(h.lower()) + ", " + std::to_string(h.upper()) + ")");
  }
  if (!(s > 0)) throw DomainError("2k + n must be positive");
  const auto [nu, dnu] = inner_target(h, mu);
  if (!(nu > 0) || !std::isfinite(nu)) throw DomainError("mu too close to the spectral edge");
  const double a = h.xi_power();
  const double two_b = 2.0 * h.eta_power();
  LambdaSolution out;
  double lambda = 0.0;
  if (!h.has_eta()) {
    lambda = std::pow(nu, 1.0 / a) / s;
  } else if (h.family() == SpectralProfile::Family::Delta) {
    lambda = 2.0 * nu / (s + std::sqrt(s * s + 4.0 * nu));
  } else if (a == two_b) {
    lambda = std::pow(nu / (std::pow(s, a) + 1.0), 1.0 / a);
  } else {
    const double log_s = std::log(s);
    const double log_nu = std::log(nu);
    // Each monomial alone bounds the root: from above by its solution of
    // term = nu, from below by its solution of term = nu / 2.
    double hi = std::min(log_nu / a - log_s, log_nu / two_b);
    double lo = std::min((log_nu - std::log(2.0)) / a - log_s, (log_nu - std::log(2.0)) / two_b);
    const double g_lo = log_inner(lo, log_s, a, two_b).first - log_nu;
    const double g_hi = log_inner(hi, log_s, a, two_b).first - log_nu;
    if (g_lo > 1e-14 || g_hi < -1e-14) {
      throw NoBracket("root of the spectral equation is not bracketed for mu = " +
                      std::to_string(mu));
    }
    double u = (std::isfinite(guess) && guess > 0) ? std::clamp(std::log(guess), lo, hi) : hi;
    for (int it = 0; it < 200; ++it) {
      const auto [val, der] = log_inner(u, log_s, a, two_b);
      const double g = val - log_nu;
      if (g > 0) hi = u; else lo = u;
      double next = u - g / der;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - u);
      u = next;
      if (step <= 1e-15 * std::max(1.0, std::abs(u)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(u))) break;
    }
    lambda = std::exp(u);
  }
  const double dinner = a * std::pow(s, a) * std::pow(lambda, a - 1.0) +
                        (h.has_eta() ? two_b * std::pow(lambda, two_b - 1.0) : 0.0);
  out.lambda = lambda;
  out.dlambda = dnu / dinner;
  return out;
}

LambdaSolution lambda_solve(const SpectralProfile& h, int k, int n, double mu) {
  if (k < 0 || n < 1) throw DomainError("lambda_solve needs k >= 0 and n >= 1");
  return lambda_solve_at(h, 2.0 * k + n, mu);
}

}  // namespace htype
