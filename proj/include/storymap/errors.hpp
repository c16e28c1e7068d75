#pragma once

#include <stdexcept>
#include <string>

namespace storymap {

// Bad input, configuration or data shape. The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Decomposition or metric breakdown. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define STORYMAP_ERROR(Name, Base)                                   \
    class Name : public Base {                                       \
    public:                                                          \
        explicit Name(const std::string& what) : Base(#Name ": " + what) {} \
    }

STORYMAP_ERROR(NoScenesFound, InputError);
STORYMAP_ERROR(InvalidBoundaries, InputError);
STORYMAP_ERROR(InvalidProfile, InputError);
STORYMAP_ERROR(DegenerateInput, InputError);
STORYMAP_ERROR(EmptyAfterPrune, InputError);
STORYMAP_ERROR(DimensionMismatch, InputError);
STORYMAP_ERROR(InvalidK, InputError);
STORYMAP_ERROR(TooFewUnits, InputError);
STORYMAP_ERROR(SchemaError, InputError);
STORYMAP_ERROR(ZeroMass, NumericalError);
STORYMAP_ERROR(NumericalFailure, NumericalError);
STORYMAP_ERROR(ZeroNormRow, NumericalError);

#undef STORYMAP_ERROR

}  // namespace storymap
