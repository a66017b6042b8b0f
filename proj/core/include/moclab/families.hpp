#pragma once

#include "moclab/forward_map.hpp"
#include "moclab/inverse_map.hpp"
#include "moclab/moc.hpp"
#include "moclab/vorticity_recovery.hpp"

#include <variant>

namespace moclab::family {

// exp applied m times; exp^0(x) = x.
double iterated_exp(int m, double x);
// log applied m times; throws DomainExceeded when an intermediate value is not positive.
double iterated_log(int m, double x);

// mu_m, h_m and f_m^t are certified for r = -log x > exp^m(1).
double threshold_r(int m);

// theta_m(p) = log p * log log p * ... (m factors)
double log_theta(int m, double p);
LpProfile theta(int m);
PhiProfile phi(int m);

// mu_m(x) = x theta_m(1/x), lambda-native: lambda(r) = log theta_m(e^r).
Moc mu(int m);

// h_m(s) = 1 / exp^{m+1}(-s), so H(s) = exp^m(-s) and h_m^{-1} = -log^m(r).
GeneratingFunction h(int m);

// f_m^t in closed form.
FlowFamily flow(int m);
AcceptableMoc f_time(int m, double t);

}  // namespace moclab::family

namespace moclab {

enum class FamilyKind { Theta, Mu, H, Flow };
using FamilyCurve = std::variant<LpProfile, Moc, GeneratingFunction, FlowFamily>;

FamilyCurve builtin_family(int m, FamilyKind kind);

}  // namespace moclab
