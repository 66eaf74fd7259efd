#include "klein/certificate.hpp"

#include <fstream>

#include "klein/sha256.hpp"

namespace klein {

Json tower_to_json(const TowerPtr& t) {
  Json levels = Json::array();
  std::vector<TowerPtr> chain;
  for (TowerPtr cur = t; cur && cur->depth() > 0; cur = cur->prefix())
    chain.push_back(cur);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const auto& L = (*it)->levels().back();
    Json coeffs = Json::array();
    for (const auto& flat : L.coeff)
      coeffs.push_back((*it)->prefix()->from_flat(flat).str());
    levels.push_back(Json{{"gen", L.gen}, {"coeffs", coeffs}});
  }
  return Json{{"levels", levels}};
}

TowerPtr tower_from_json(const Json& j) {
  TowerPtr t = FieldTower::rationals();
  for (const auto& lvl : j.at("levels")) {
    std::vector<FieldElement> coeffs;
    for (const auto& c : lvl.at("coeffs"))
      coeffs.push_back(parse_element(t, c.get<std::string>()));
    t = FieldTower::extend(t, lvl.at("gen").get<std::string>(), coeffs);
  }
  return t;
}

Json seal_certificate(const std::string& kind, Json body) {
  std::string digest = Sha256::hash_hex(body.dump());
  return Json{
      {"kind", kind}, {"version", 1}, {"body", std::move(body)},
      {"sha256", digest}};
}

Json open_certificate(const Json& sealed, const std::string& expected_kind) {
  if (!sealed.contains("kind") || !sealed.contains("body") ||
      !sealed.contains("sha256"))
    throw error("certificate: missing envelope fields");
  if (sealed.at("kind").get<std::string>() != expected_kind)
    throw error("certificate: kind mismatch, expected " + expected_kind +
                ", found " + sealed.at("kind").get<std::string>());
  std::string digest = Sha256::hash_hex(sealed.at("body").dump());
  if (digest != sealed.at("sha256").get<std::string>())
    throw error("certificate: integrity failure (body digest mismatch)");
  return sealed.at("body");
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw error("write failed: " + path);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open: " + path);
  Json j;
  in >> j;
  return j;
}

}  // namespace klein
