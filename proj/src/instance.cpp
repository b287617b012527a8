#include "covshift/instance.hpp"

#include <fstream>

namespace covshift {

namespace {

double number(const nlohmann::json& j, const char* key)
{
  if (!j.contains(key) || !j.at(key).is_number())
    throw config_error(std::string("instance: missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

int integer(const nlohmann::json& j, const char* key)
{
  if (!j.contains(key) || !j.at(key).is_number_integer())
    throw config_error(std::string("instance: missing integer field '") + key + "'");
  return j.at(key).get<int>();
}

std::string text(const nlohmann::json& j, const char* key)
{
  if (!j.contains(key) || !j.at(key).is_string())
    throw config_error(std::string("instance: missing string field '") + key + "'");
  return j.at(key).get<std::string>();
}

FamilyDecl family_from_json(const nlohmann::json& j)
{
  const auto kind = text(j, "kind");
  FamilyDecl f;
  if (kind == "big" || kind == "small") {
    f.kind = kind == "big" ? FamilyKind::big : FamilyKind::small;
    f.first = number(j, "alpha");
    f.second = number(j, "C");
  } else if (kind == "transfer") {
    f.kind = FamilyKind::transfer;
    f.first = number(j, "gamma");
    if (j.contains("K"))
      f.second = number(j, "K");
  } else if (kind == "lr_bounded") {
    f.kind = FamilyKind::lr_bounded;
    f.first = number(j, "b");
  } else {
    throw config_error("instance: unknown family kind '" + kind + "'");
  }
  f.validate();
  return f;
}

nlohmann::json family_to_json(const FamilyDecl& f)
{
  nlohmann::json j;
  j["kind"] = to_string(f.kind);
  switch (f.kind) {
    case FamilyKind::big:
    case FamilyKind::small:
      j["alpha"] = f.first;
      j["C"] = f.second.value_or(1.0);
      break;
    case FamilyKind::transfer:
      j["gamma"] = f.first;
      if (f.second)
        j["K"] = *f.second;
      break;
    case FamilyKind::lr_bounded:
      j["b"] = f.first;
      break;
  }
  return j;
}

} // namespace

Distribution distribution_from_json(const nlohmann::json& j)
{
  if (!j.is_object())
    throw config_error("instance: distribution must be an object");
  const auto type = text(j, "type");
  if (type == "uniform")
    return Distribution::uniform(j.value("a", 0.0), j.value("b", 1.0));
  if (type == "power")
    return Distribution::power(number(j, "kappa"));
  if (type == "reverse_power")
    return Distribution::reverse_power(number(j, "alpha"));
  if (type == "point_mass")
    return Distribution::point_mass(number(j, "location"));
  if (type == "mixture") {
    if (!j.contains("components") || !j.at("components").is_array())
      throw config_error("instance: mixture needs a 'components' array");
    std::vector<MixtureComponent> parts;
    for (const auto& c : j.at("components"))
      parts.push_back({number(c, "weight"), distribution_from_json(c.at("dist"))});
    return Distribution::mixture(std::move(parts));
  }
  if (type == "hard_source" || type == "hard_target") {
    const auto p = hard_pair_params(number(j, "alpha"), number(j, "C"), integer(j, "M"));
    return Distribution::hard(type == "hard_source" ? HardRole::source : HardRole::target, p);
  }
  throw config_error("instance: unknown distribution type '" + type + "'");
}

nlohmann::json distribution_to_json(const Distribution& dist)
{
  nlohmann::json j;
  if (const auto* u = dist.get_if<Uniform>()) {
    j = {{"type", "uniform"}, {"a", u->a}, {"b", u->b}};
  } else if (const auto* p = dist.get_if<PowerDensity>()) {
    j = {{"type", "power"}, {"kappa", p->kappa}};
  } else if (const auto* rp = dist.get_if<ReversePower>()) {
    j = {{"type", "reverse_power"}, {"alpha", rp->alpha}};
  } else if (const auto* pm = dist.get_if<PointMass>()) {
    j = {{"type", "point_mass"}, {"location", pm->location}};
  } else if (const auto* pc = dist.get_if<PiecewiseConstantHard>()) {
    j = {{"type", pc->role == HardRole::source ? "hard_source" : "hard_target"},
         {"alpha", pc->params.alpha},
         {"C", pc->params.C},
         {"M", pc->params.M}};
  } else if (const auto* mix = dist.get_if<Mixture>()) {
    j["type"] = "mixture";
    j["components"] = nlohmann::json::array();
    for (const auto& c : mix->components)
      j["components"].push_back({{"weight", c.weight}, {"dist", distribution_to_json(c.dist)}});
  }
  return j;
}

SourceTargetPair pair_from_json(const nlohmann::json& doc)
{
  try {
    const auto& j = doc.contains("pair") ? doc.at("pair") : doc;
    const auto kind = text(j, "kind");
    if (kind == "hard_big")
      return hard_pair_big(number(j, "alpha"), number(j, "C"), integer(j, "M"));
    if (kind == "hard_small")
      return hard_pair_small(number(j, "alpha"));
    if (kind == "power")
      return power_pair(number(j, "kappa"));
    if (kind == "custom") {
      SourceTargetPair pair{distribution_from_json(j.at("P")), distribution_from_json(j.at("Q")), std::nullopt};
      if (j.contains("family"))
        pair.family = family_from_json(j.at("family"));
      return pair;
    }
    throw config_error("instance: unknown pair kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("instance: ") + e.what());
  } catch (const std::domain_error& e) {
    throw config_error(std::string("instance: ") + e.what());
  }
}

nlohmann::json pair_to_json(const SourceTargetPair& pair)
{
  nlohmann::json j;
  if (const auto* hp = pair.hard_params()) {
    j = {{"kind", "hard_big"}, {"alpha", hp->alpha}, {"C", hp->C}, {"M", hp->M}};
  } else if (const auto* rp = pair.P.get_if<ReversePower>();
             rp && pair.Q.get_if<PointMass>() && pair.Q.get_if<PointMass>()->location == 1.0 && pair.family &&
             pair.family->kind == FamilyKind::small) {
    j = {{"kind", "hard_small"}, {"alpha", rp->alpha}};
  } else if (const auto* pd = pair.P.get_if<PowerDensity>();
             pd && pair.Q.get_if<Uniform>() && pair.family && pair.family->kind == FamilyKind::transfer &&
             !pair.family->second) {
    j = {{"kind", "power"}, {"kappa", pd->kappa}};
  } else {
    j = {{"kind", "custom"}, {"P", distribution_to_json(pair.P)}, {"Q", distribution_to_json(pair.Q)}};
    if (pair.family)
      j["family"] = family_to_json(*pair.family);
  }
  return nlohmann::json{{"pair", j}};
}

nlohmann::json read_json_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw config_error("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw config_error("cannot parse '" + path.string() + "': " + e.what());
  }
}

SourceTargetPair load_instance(const std::filesystem::path& path)
{
  return pair_from_json(read_json_file(path));
}

} // namespace covshift
