#include "cmlab/error.hpp"

namespace cmlab {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::UnknownField: return "UnknownField";
        case Errc::NotPrime: return "NotPrime";
        case Errc::ZeroIdeal: return "ZeroIdeal";
        case Errc::NotCM: return "NotCM";
        case Errc::SingularModel: return "SingularModel";
        case Errc::ConductorMismatch: return "ConductorMismatch";
        case Errc::BadReduction: return "BadReduction";
        case Errc::RamifiedOrBadPrime: return "RamifiedOrBadPrime";
        case Errc::AmbiguousGenerator: return "AmbiguousGenerator";
        case Errc::NotCoprimeToConductor: return "NotCoprimeToConductor";
        case Errc::PrecisionLoss: return "PrecisionLoss";
        case Errc::LatticeMismatch: return "LatticeMismatch";
        case Errc::PoleAtS: return "PoleAtS";
        case Errc::FitDegenerate: return "FitDegenerate";
        case Errc::RecognitionFailed: return "RecognitionFailed";
        case Errc::ZeroValue: return "ZeroValue";
        case Errc::SplitPrimeAmbiguity: return "SplitPrimeAmbiguity";
        case Errc::NonUnit: return "NonUnit";
        case Errc::HenselFails: return "HenselFails";
        case Errc::NonUnitConstantTerm: return "NonUnitConstantTerm";
        case Errc::NotReversible: return "NotReversible";
        case Errc::IntegralityFailure: return "IntegralityFailure";
        case Errc::TruncationTooShort: return "TruncationTooShort";
        case Errc::NotUniformizer: return "NotUniformizer";
        case Errc::SparsityViolation: return "SparsityViolation";
        case Errc::PoleAtLatticePoint: return "PoleAtLatticePoint";
        case Errc::EvaluationAtTorsion: return "EvaluationAtTorsion";
        case Errc::RadiusTooLarge: return "RadiusTooLarge";
        case Errc::CyclotomicObstruction: return "CyclotomicObstruction";
        case Errc::SearchExhausted: return "SearchExhausted";
        case Errc::ParseError: return "ParseError";
        case Errc::DuplicateLabel: return "DuplicateLabel";
        case Errc::UnknownCurve: return "UnknownCurve";
    }
    return "Unknown";
}

}  // namespace cmlab
