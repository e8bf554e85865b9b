#pragma once

#include <stdexcept>
#include <string>

namespace lss {

/// Malformed input: bad file, dangling reference, invalid run.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An exploration or search exceeded its configured bound.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// DNF conversion produced more disjuncts than allowed.
class DnfBlowup : public BudgetExceeded {
public:
    using BudgetExceeded::BudgetExceeded;
};

/// An engine was asked to run on a system outside its class
/// (unsound, not 2-lock, not exclusive, not nested).
class Inapplicable : public std::runtime_error {
public:
    Inapplicable(std::string classifier, const std::string& msg)
        : std::runtime_error(msg), classifier_(std::move(classifier)) {}
    const std::string& classifier() const { return classifier_; }

private:
    std::string classifier_;
};

}  // namespace lss
