#pragma once

#include <json.hpp>

#include <Eigen/Dense>

namespace flowdeg::detail {

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json_array(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Eigen::VectorXd vector_from_json(const ordered_json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

}  // namespace flowdeg::detail
