#include "ragloop/prompts.hpp"

#include "ragloop/error.hpp"

#include "builtin_prompts.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ragloop {

std::string substitute_placeholders(std::string_view tmpl,
                                    const std::map<std::string, std::string>& vars) {
    std::string out(tmpl);
    for (const auto& [key, value] : vars) {
        const std::string token = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = out.find(token, pos)) != std::string::npos) {
            out.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    return out;
}

namespace {

constexpr std::array<RoleTag, 6> kAllRoles{
    RoleTag::BrainstormQuestions, RoleTag::BrainstormNotes,      RoleTag::HypSat,
    RoleTag::Refine,              RoleTag::BaselineHypothesize, RoleTag::BaselineSatisfy,
};

std::string read_template_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("missing prompt template: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

} // namespace

PromptLibrary PromptLibrary::builtin() {
    PromptLibrary lib;
    lib.templates_[RoleTag::BrainstormQuestions] = {detail::kBrainstormQuestionsSystem,
                                                    detail::kBrainstormQuestionsUser};
    lib.templates_[RoleTag::BrainstormNotes] = {detail::kBrainstormNotesSystem,
                                                detail::kBrainstormNotesUser};
    lib.templates_[RoleTag::HypSat] = {detail::kHypSatSystem, detail::kHypSatUser};
    lib.templates_[RoleTag::Refine] = {detail::kRefineSystem, detail::kRefineUser};
    lib.templates_[RoleTag::BaselineHypothesize] = {detail::kBaselineHypothesizeSystem,
                                                    detail::kBaselineHypothesizeUser};
    lib.templates_[RoleTag::BaselineSatisfy] = {detail::kBaselineSatisfySystem,
                                                detail::kBaselineSatisfyUser};
    return lib;
}

PromptLibrary PromptLibrary::from_directory(const std::string& dir) {
    PromptLibrary lib;
    for (RoleTag role : kAllRoles) {
        const std::string base = std::string(to_string(role));
        std::filesystem::path root(dir);
        lib.templates_[role] = {read_template_file(root / (base + ".system.txt")),
                                read_template_file(root / (base + ".user.txt"))};
    }
    return lib;
}

PromptLibrary::Rendered PromptLibrary::render(
    RoleTag role, const std::map<std::string, std::string>& vars) const {
    const auto& pair = templates_.at(role);
    return Rendered{substitute_placeholders(pair.system, vars),
                    substitute_placeholders(pair.user, vars)};
}

const std::string& PromptLibrary::system_template(RoleTag role) const {
    return templates_.at(role).system;
}

const std::string& PromptLibrary::user_template(RoleTag role) const {
    return templates_.at(role).user;
}

} // namespace ragloop
