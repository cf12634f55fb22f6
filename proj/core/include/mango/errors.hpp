// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mango
{

/// Base of every error raised by the engine.
class Error: public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

#define MANGO_DEFINE_ERROR(Name)            \
    class Name: public Error                \
    {                                       \
      public:                               \
        using Error::Error;                 \
    }

MANGO_DEFINE_ERROR(InvalidUrl);
MANGO_DEFINE_ERROR(FetchError);
MANGO_DEFINE_ERROR(RootUnreachable);
MANGO_DEFINE_ERROR(EmptyCorpus);
MANGO_DEFINE_ERROR(EmptyCandidates);
MANGO_DEFINE_ERROR(SearchUnavailable);
MANGO_DEFINE_ERROR(AllArmsExhausted);
MANGO_DEFINE_ERROR(UnknownArm);
MANGO_DEFINE_ERROR(ArmAlreadyExhausted);
MANGO_DEFINE_ERROR(PersistenceFailure);
MANGO_DEFINE_ERROR(AdapterFailure);
MANGO_DEFINE_ERROR(AgentFailure);
MANGO_DEFINE_ERROR(EnvironmentFailure);
MANGO_DEFINE_ERROR(ReflectorFailure);
MANGO_DEFINE_ERROR(FixtureError);

#undef MANGO_DEFINE_ERROR

} // namespace mango
