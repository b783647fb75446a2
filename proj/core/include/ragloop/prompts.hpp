#pragma once

#include "ragloop/gateway.hpp"

#include <map>
#include <string>
#include <string_view>

namespace ragloop {

/// Replaces every "{key}" occurrence for the keys present in `vars`.
/// Unknown braces are left untouched, so JSON examples inside templates
/// survive substitution.
std::string substitute_placeholders(std::string_view tmpl,
                                    const std::map<std::string, std::string>& vars);

/// The six prompt-template pairs, one per role tag.
///
/// Templates are plain text with {user_query}, {notes}, {query_log},
/// {chunks}, {n_questions} and {hypothesis} placeholders. The builtin set
/// is embedded at build time from prompts/ ; from_directory() loads
/// overrides from "<role>.system.txt" / "<role>.user.txt" files.
class PromptLibrary {
public:
    struct Rendered {
        std::string system;
        std::string user;
    };

    static PromptLibrary builtin();
    static PromptLibrary from_directory(const std::string& dir);

    Rendered render(RoleTag role, const std::map<std::string, std::string>& vars) const;

    const std::string& system_template(RoleTag role) const;
    const std::string& user_template(RoleTag role) const;

private:
    struct Pair {
        std::string system;
        std::string user;
    };

    std::map<RoleTag, Pair> templates_;
};

} // namespace ragloop
