#pragma once

#include <stdexcept>
#include <string>

namespace weaver {

// Base for every error the engine raises on purpose. Callers that must not
// abort a sweep catch this type and record the message.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define WEAVER_DEFINE_ERROR(Name)                 \
    class Name : public Error {                   \
    public:                                       \
        using Error::Error;                       \
    }

WEAVER_DEFINE_ERROR(InvalidArgument);
WEAVER_DEFINE_ERROR(UnknownModel);
WEAVER_DEFINE_ERROR(BackendUnavailable);
WEAVER_DEFINE_ERROR(MalformedUsage);
WEAVER_DEFINE_ERROR(UnknownDocument);
WEAVER_DEFINE_ERROR(UnknownAction);
WEAVER_DEFINE_ERROR(DuplicateAction);
WEAVER_DEFINE_ERROR(ModuleFailed);
WEAVER_DEFINE_ERROR(PolicyFailure);
WEAVER_DEFINE_ERROR(MissingCostProfile);
WEAVER_DEFINE_ERROR(EmptyStore);
WEAVER_DEFINE_ERROR(EmptyResults);
WEAVER_DEFINE_ERROR(ParseFailure);
WEAVER_DEFINE_ERROR(ConfigError);
WEAVER_DEFINE_ERROR(IoError);

#undef WEAVER_DEFINE_ERROR

}  // namespace weaver
