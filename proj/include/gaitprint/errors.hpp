#pragma once

#include <stdexcept>
#include <string>

namespace gaitprint {

// Base class for all library errors. Catch this to handle anything
// gaitprint throws; catch a subclass for a specific failure category.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// signal_model
class DegenerateSeries : public Error { using Error::Error; };
class WindowTooLarge : public Error { using Error::Error; };
class NonFiniteInput : public Error { using Error::Error; };

// pqrst_detector
class SeriesTooShort : public Error { using Error::Error; };

// feature_extraction / evaluation
class EmptyInput : public Error { using Error::Error; };

// classifiers
class ClassMissing : public Error { using Error::Error; };
class SingularCovariance : public Error { using Error::Error; };
class DimMismatch : public Error { using Error::Error; };
class NonFinite : public Error { using Error::Error; };

// evaluation
class SingleClass : public Error { using Error::Error; };
class MissingSession : public Error { using Error::Error; };

// dataset_ingest
class MissingRoot : public Error { using Error::Error; };
class NoSubjectsRemain : public Error { using Error::Error; };

// synth_oracle / cli
class InvalidParams : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

}  // namespace gaitprint
