#pragma once

// Builtin prompt templates, embedded at build time from prompts/*.txt.

namespace ragloop::detail {

extern const char* const kBrainstormQuestionsSystem;
extern const char* const kBrainstormQuestionsUser;
extern const char* const kBrainstormNotesSystem;
extern const char* const kBrainstormNotesUser;
extern const char* const kHypSatSystem;
extern const char* const kHypSatUser;
extern const char* const kRefineSystem;
extern const char* const kRefineUser;
extern const char* const kBaselineHypothesizeSystem;
extern const char* const kBaselineHypothesizeUser;
extern const char* const kBaselineSatisfySystem;
extern const char* const kBaselineSatisfyUser;

} // namespace ragloop::detail
