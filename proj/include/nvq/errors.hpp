#pragma once

#include <stdexcept>
#include <string>

namespace nvq {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define NVQ_DEFINE_ERROR(Name)                 \
    class Name : public Error {                \
    public:                                    \
        using Error::Error;                    \
    }

// mdp_core
NVQ_DEFINE_ERROR(NormalizationError);
NVQ_DEFINE_ERROR(OrphanStateError);
NVQ_DEFINE_ERROR(DanglingReferenceError);
NVQ_DEFINE_ERROR(InadmissiblePairError);
NVQ_DEFINE_ERROR(DiscountRangeError);
NVQ_DEFINE_ERROR(InvalidPolicyError);
NVQ_DEFINE_ERROR(AbsorbingDeadEndError);

// symmetry
NVQ_DEFINE_ERROR(ForeignElementError);
NVQ_DEFINE_ERROR(InvalidSymmetryError);
NVQ_DEFINE_ERROR(RepresentativeMismatchError);
NVQ_DEFINE_ERROR(BlockMismatchError);

// transforms
NVQ_DEFINE_ERROR(NotBijectiveError);
NVQ_DEFINE_ERROR(CoverageError);
NVQ_DEFINE_ERROR(DomainMismatchError);
NVQ_DEFINE_ERROR(InvalidHiddenSymmetryError);

// newsvendor
NVQ_DEFINE_ERROR(SpecError);
NVQ_DEFINE_ERROR(OutOfRangeActionError);
NVQ_DEFINE_ERROR(OutOfSupportError);
NVQ_DEFINE_ERROR(HorizonError);
NVQ_DEFINE_ERROR(StructureMismatchError);
NVQ_DEFINE_ERROR(SymmetryConstructionError);

/// Raised for a deviation value outside the support.
class OutOfSupportDeviationError : public OutOfSupportError {
public:
    using OutOfSupportError::OutOfSupportError;
};

// solver
NVQ_DEFINE_ERROR(NotBanditShapedError);

// cli
NVQ_DEFINE_ERROR(ParseError);
NVQ_DEFINE_ERROR(SchemaError);
NVQ_DEFINE_ERROR(InvariantError);

#undef NVQ_DEFINE_ERROR

}  // namespace nvq
