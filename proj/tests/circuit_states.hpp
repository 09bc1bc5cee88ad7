#pragma once

// The three-agent circuit's intermediate states, transcribed term by term from
// the worked case algebra. Keys list qubits in the order a1, b, a3, a2, c.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "ghznet/locc.hpp"
#include "oracles.hpp"

namespace circuit {

using Terms = std::map<std::string, oracle::Complex>;

// Qubits of the two-pair setup plus the sharer's ancilla: a1, b, a3, a2, c.
inline std::vector<ghznet::QubitId> circuit_qubits(const ghznet::NetworkState& net) {
  const auto& pairs = net.epr_pairs();
  const ghznet::QubitId a1 = pairs[0].qa;
  const ghznet::QubitId b = pairs[0].qb;
  const ghznet::QubitId a2 = pairs[1].qa;
  const ghznet::QubitId c = pairs[1].qb;
  ghznet::QubitId a3{};
  for (ghznet::QubitId q : net.qubits_of(pairs[0].a)) {
    if (q != a1 && q != a2) a3 = q;
  }
  return {a1, b, a3, a2, c};
}

// m2 / m1 are -1 before the corresponding measurement.
inline Terms phi_terms(const std::string& label, int m2, int m1) {
  const double h = 0.5;
  const double r = 1.0 / std::sqrt(2.0);
  if (label == "phi1") return {{"00000", h}, {"00011", h}, {"11100", h}, {"11111", h}};
  if (label == "phi2") return {{"00000", h}, {"00011", h}, {"11110", h}, {"11101", h}};

  // Case 1: M2 = 0
  static const std::map<std::tuple<std::string, int>, Terms> case1 = {
      {{"phi3", -1}, {{"00000", r}, {"11101", r}}},
      {{"phi4", -1}, {{"00000", h}, {"00100", h}, {"11001", h}, {"11101", -h}}},
      {{"phi5", 0}, {{"00000", r}, {"11001", r}}},
      {{"phi6", 0}, {{"00000", r}, {"11001", r}}},
      {{"phi7", 0}, {{"00000", r}, {"11001", r}}},
      {{"phi5", 1}, {{"00100", r}, {"11101", -r}}},
      {{"phi6", 1}, {{"00100", r}, {"11101", -r}}},
      {{"phi7", 1}, {{"00100", r}, {"11101", r}}},
  };
  // Case 2: M2 = 1
  static const std::map<std::tuple<std::string, int>, Terms> case2 = {
      {{"phi3", -1}, {{"00011", r}, {"11110", r}}},
      {{"phi4", -1}, {{"00011", h}, {"00111", h}, {"11010", h}, {"11110", -h}}},
      {{"phi5", 0}, {{"00011", r}, {"11010", r}}},
      {{"phi6", 0}, {{"11011", r}, {"00010", r}}},
      {{"phi7", 0}, {{"11011", r}, {"00010", r}}},
      {{"phi5", 1}, {{"00111", r}, {"11110", -r}}},
      {{"phi6", 1}, {{"11111", r}, {"00110", -r}}},
      {{"phi7", 1}, {{"11111", -r}, {"00110", -r}}},
  };
  const auto& table = m2 == 0 ? case1 : case2;
  const int key = (label == "phi3" || label == "phi4") ? -1 : m1;
  const auto it = table.find({label, key});
  if (m2 < 0 || it == table.end()) throw std::logic_error("no reference state for " + label);
  return it->second;
}

inline ghznet::StateVector phi(const std::string& label, int m2, int m1,
                               const std::vector<ghznet::QubitId>& ids) {
  return oracle::from_terms(ids, phi_terms(label, m2, m1));
}

}  // namespace circuit
