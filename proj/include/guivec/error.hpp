// Copyright 2026 The guivec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace guivec {

// Base for every error raised by the library. Subclasses map one-to-one onto
// the failure modes callers are expected to distinguish.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GUIVEC_DEFINE_ERROR(Name)            \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

GUIVEC_DEFINE_ERROR(MalformedDocument);
GUIVEC_DEFINE_ERROR(NodesNotInSameTree);
GUIVEC_DEFINE_ERROR(TargetNotEmbeddable);
GUIVEC_DEFINE_ERROR(EmptyTrace);
GUIVEC_DEFINE_ERROR(ProviderUnavailable);
GUIVEC_DEFINE_ERROR(ShapeMismatch);
GUIVEC_DEFINE_ERROR(EmptySequence);
GUIVEC_DEFINE_ERROR(IndexOutOfRange);
GUIVEC_DEFINE_ERROR(DegenerateScreen);
GUIVEC_DEFINE_ERROR(EmptyCorpus);
GUIVEC_DEFINE_ERROR(EmptyContext);
GUIVEC_DEFINE_ERROR(UniverseTooSmall);
GUIVEC_DEFINE_ERROR(DimensionMismatch);
GUIVEC_DEFINE_ERROR(UnknownScreenId);
GUIVEC_DEFINE_ERROR(FingerprintMismatch);
GUIVEC_DEFINE_ERROR(FormatError);

#undef GUIVEC_DEFINE_ERROR

}  // namespace guivec
