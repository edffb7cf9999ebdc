#pragma once

#include <stdexcept>
#include <string>

namespace cmlab {

enum class Errc {
    InvalidArgument,
    UnknownField,
    NotPrime,
    ZeroIdeal,
    NotCM,
    SingularModel,
    ConductorMismatch,
    BadReduction,
    RamifiedOrBadPrime,
    AmbiguousGenerator,
    NotCoprimeToConductor,
    PrecisionLoss,
    LatticeMismatch,
    PoleAtS,
    FitDegenerate,
    RecognitionFailed,
    ZeroValue,
    SplitPrimeAmbiguity,
    NonUnit,
    HenselFails,
    NonUnitConstantTerm,
    NotReversible,
    IntegralityFailure,
    TruncationTooShort,
    NotUniformizer,
    SparsityViolation,
    PoleAtLatticePoint,
    EvaluationAtTorsion,
    RadiusTooLarge,
    CyclotomicObstruction,
    SearchExhausted,
    ParseError,
    DuplicateLabel,
    UnknownCurve,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace cmlab
