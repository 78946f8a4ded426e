#pragma once

#include <stdexcept>
#include <string>

namespace odlab {

// Invalid user input: bad configuration, bad spec, out-of-range parameter.
// The CLI maps these to exit code 1; anything else is an internal failure.
struct SpecError : std::runtime_error {
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

struct BudgetExceeded : SpecError {
    explicit BudgetExceeded(const std::string& what) : SpecError(what) {}
};

struct ShapeMismatch : SpecError {
    explicit ShapeMismatch(const std::string& what) : SpecError(what) {}
};

struct MgfOverflow : SpecError {
    explicit MgfOverflow(const std::string& what) : SpecError(what) {}
};

struct InadmissibleLambda : SpecError {
    explicit InadmissibleLambda(const std::string& what) : SpecError(what) {}
};

struct InvalidSlack : SpecError {
    explicit InvalidSlack(const std::string& what) : SpecError(what) {}
};

struct DegenerateInput : SpecError {
    explicit DegenerateInput(const std::string& what) : SpecError(what) {}
};

struct OutOfOrderRound : SpecError {
    explicit OutOfOrderRound(const std::string& what) : SpecError(what) {}
};

struct DegenerateSwitchMass : SpecError {
    explicit DegenerateSwitchMass(const std::string& what) : SpecError(what) {}
};

}  // namespace odlab
