#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "pgg/error.hpp"

namespace pgg {

enum class Role { Friend, Neighbor, Classmate, Stranger, Teacher, Relative };

inline constexpr std::array<Role, 6> kAllRoles = {Role::Friend,   Role::Neighbor, Role::Classmate,
                                                  Role::Stranger, Role::Teacher,  Role::Relative};

constexpr std::string_view to_string(Role r) {
  switch (r) {
    case Role::Friend: return "friend";
    case Role::Neighbor: return "neighbor";
    case Role::Classmate: return "classmate";
    case Role::Stranger: return "stranger";
    case Role::Teacher: return "teacher";
    case Role::Relative: return "relative";
  }
  return "?";
}

inline std::optional<Role> parse_role(std::string_view text) {
  for (Role r : kAllRoles) {
    if (text == to_string(r)) return r;
  }
  return std::nullopt;
}

/// Post-game answers from one human participant.
struct QuestionnaireResponse {
  std::optional<int> age;
  std::optional<std::string> gender;
  bool seen_robot_before = false;
  int generosity = 3;  // 1 = not generous at all, 5 = very generous
  Role perceived_role = Role::Stranger;

  friend bool operator==(const QuestionnaireResponse&, const QuestionnaireResponse&) = default;
};

inline nlohmann::json to_json(const QuestionnaireResponse& q) {
  nlohmann::json j;
  j["age"] = q.age ? nlohmann::json(*q.age) : nlohmann::json(nullptr);
  j["gender"] = q.gender ? nlohmann::json(*q.gender) : nlohmann::json(nullptr);
  j["seen_robot_before"] = q.seen_robot_before;
  j["generosity"] = q.generosity;
  j["perceived_role"] = std::string(to_string(q.perceived_role));
  return j;
}

/// Strict parse; any missing or out-of-range field throws InvalidQuestionnaire.
inline QuestionnaireResponse questionnaire_from_json(const nlohmann::json& j) {
  auto invalid = [](const std::string& why) { return Error(ErrorCode::InvalidQuestionnaire, why); };
  if (!j.is_object()) throw invalid("answers must be an object");
  QuestionnaireResponse q;
  if (auto it = j.find("age"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw invalid("age must be an integer");
    q.age = it->get<int>();
  }
  if (auto it = j.find("gender"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw invalid("gender must be text");
    q.gender = it->get<std::string>();
  }
  auto seen = j.find("seen_robot_before");
  if (seen == j.end() || !seen->is_boolean()) throw invalid("seen_robot_before must be a boolean");
  q.seen_robot_before = seen->get<bool>();

  auto gen = j.find("generosity");
  if (gen == j.end() || !gen->is_number_integer()) throw invalid("generosity must be an integer");
  q.generosity = gen->get<int>();
  if (q.generosity < 1 || q.generosity > 5) throw invalid("generosity must be in [1, 5]");

  auto role = j.find("perceived_role");
  if (role == j.end() || !role->is_string()) throw invalid("perceived_role must be text");
  auto parsed = parse_role(role->get<std::string>());
  if (!parsed) throw invalid("unknown perceived_role '" + role->get<std::string>() + "'");
  q.perceived_role = *parsed;
  return q;
}

}  // namespace pgg
