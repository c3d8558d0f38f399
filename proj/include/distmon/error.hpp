#pragma once

#include <stdexcept>
#include <string>

namespace distmon {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define DISTMON_DEFINE_ERROR(Name)                                         \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

// geometry
DISTMON_DEFINE_ERROR(DegenerateConfiguration);
DISTMON_DEFINE_ERROR(NonFinite);
DISTMON_DEFINE_ERROR(PointAtInfinity);

// scene
DISTMON_DEFINE_ERROR(SelfIntersecting);
DISTMON_DEFINE_ERROR(TooFewVertices);
DISTMON_DEFINE_ERROR(ValidationError);

// ingest
DISTMON_DEFINE_ERROR(MalformedRecord);

// monitor
DISTMON_DEFINE_ERROR(OutOfOrderFrame);

// density
DISTMON_DEFINE_ERROR(InsufficientData);
DISTMON_DEFINE_ERROR(DegenerateX);
DISTMON_DEFINE_ERROR(DomainError);
DISTMON_DEFINE_ERROR(NonPositiveSlope);
DISTMON_DEFINE_ERROR(ZeroVariance);

// simulate
DISTMON_DEFINE_ERROR(ProjectionSingular);

// report
DISTMON_DEFINE_ERROR(EmptyInput);

#undef DISTMON_DEFINE_ERROR

/// Config/document syntax error carrying the offending line and field.
class ParseError : public Error {
public:
    ParseError(int line, std::string field, const std::string& what)
        : Error("ParseError: line " + std::to_string(line) +
                (field.empty() ? "" : " [" + field + "]") + ": " + what),
          line_(line),
          field_(std::move(field)) {}

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

}  // namespace distmon
