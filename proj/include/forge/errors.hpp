#pragma once

#include <stdexcept>
#include <string>

namespace forge {

/// Inputs that violate a structural contract (mismatched group specs,
/// malformed rotation maps, dimension mismatches).
class structural_error : public std::runtime_error {
public:
    explicit structural_error(const std::string& what) : std::runtime_error(what) {}
};

/// Inputs outside an operation's domain (empty sets, bad index ranges,
/// non-symmetric generator multisets).
class domain_error : public std::domain_error {
public:
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

/// A configured cap or search budget was exceeded. The message names the
/// cap and, where useful, the best value achieved before giving up.
class capacity_error : public std::runtime_error {
public:
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

/// A walk plan whose stated hypotheses do not hold for the certified
/// quantities it carries.
class plan_error : public std::runtime_error {
public:
    explicit plan_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace forge
