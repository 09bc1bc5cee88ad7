#pragma once

// Exact pure-state simulation over a dynamic set of labelled qubits.
//
// Amplitude index bit b (least significant first) addresses qubits()[b].
// Every comparison between two registers aligns qubits by QubitId, never by
// position, so registers can be re-ordered or shrunk freely.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ghznet/errors.hpp"

namespace ghznet {

using Complex = std::complex<double>;

inline constexpr double kProbabilityTolerance = 1e-12;
inline constexpr double kFidelityTolerance = 1e-10;

struct QubitId {
  std::uint32_t value{};

  friend constexpr auto operator<=>(const QubitId&, const QubitId&) = default;
};

inline std::string to_string(QubitId q) { return "q" + std::to_string(q.value); }

class StateVector {
 public:
  // Scalar state: no qubits, a single amplitude of 1.
  StateVector() : amplitudes_{Complex{1.0, 0.0}} {}

  // Takes ownership of explicit amplitudes. The vector must have length
  // 2^qubits.size() and unit norm within 1e-10; it is renormalised exactly.
  static StateVector from_amplitudes(std::vector<QubitId> qubits,
                                     std::vector<Complex> amplitudes) {
    check_distinct(qubits);
    if (amplitudes.size() != (std::size_t{1} << qubits.size())) {
      throw InvalidArgument("amplitude count does not match 2^qubits");
    }
    double norm = 0.0;
    for (const auto& a : amplitudes) norm += std::norm(a);
    if (std::abs(norm - 1.0) > kFidelityTolerance) {
      throw InvalidArgument("amplitudes are not normalised");
    }
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& a : amplitudes) a *= scale;
    StateVector sv;
    sv.qubits_ = std::move(qubits);
    sv.amplitudes_ = std::move(amplitudes);
    return sv;
  }

  std::span<const QubitId> qubits() const noexcept { return qubits_; }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  std::size_t qubit_count() const noexcept { return qubits_.size(); }

  bool contains(QubitId q) const noexcept {
    return std::find(qubits_.begin(), qubits_.end(), q) != qubits_.end();
  }

  // Bit position of q; throws if q is not in the register.
  std::size_t position(QubitId q) const {
    auto it = std::find(qubits_.begin(), qubits_.end(), q);
    if (it == qubits_.end()) {
      throw InvalidArgument("unknown qubit " + to_string(q));
    }
    return static_cast<std::size_t>(it - qubits_.begin());
  }

  double norm_squared() const noexcept {
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return s;
  }

  static void check_distinct(std::span<const QubitId> ids) {
    std::vector<QubitId> sorted(ids.begin(), ids.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InvalidArgument("duplicate qubit id");
    }
  }

 private:
  friend StateVector tensor(const StateVector&, const StateVector&);
  friend StateVector new_register(std::span<const QubitId>);
  friend class StateAccess;

  std::vector<QubitId> qubits_;
  std::vector<Complex> amplitudes_;
};

// Mutable access for the kernels in this header.
class StateAccess {
 public:
  static std::vector<Complex>& amplitudes(StateVector& sv) { return sv.amplitudes_; }
  static std::vector<QubitId>& qubits(StateVector& sv) { return sv.qubits_; }
};

namespace detail {

// Spreads k over all indices whose bit `pos` is zero.
constexpr std::size_t insert_zero_bit(std::size_t k, std::size_t pos) noexcept {
  const std::size_t low = k & ((std::size_t{1} << pos) - 1);
  return ((k >> pos) << (pos + 1)) | low;
}

}  // namespace detail

inline StateVector new_register(std::span<const QubitId> ids) {
  StateVector::check_distinct(ids);
  StateVector sv;
  sv.qubits_.assign(ids.begin(), ids.end());
  sv.amplitudes_.assign(std::size_t{1} << ids.size(), Complex{});
  sv.amplitudes_[0] = 1.0;
  return sv;
}

inline StateVector new_register(std::initializer_list<QubitId> ids) {
  return new_register(std::span<const QubitId>(ids.begin(), ids.size()));
}

// |lhs> ⊗ |rhs>, with lhs qubits in the low bits.
inline StateVector tensor(const StateVector& lhs, const StateVector& rhs) {
  std::vector<QubitId> ids = lhs.qubits_;
  ids.insert(ids.end(), rhs.qubits_.begin(), rhs.qubits_.end());
  StateVector::check_distinct(ids);
  StateVector out;
  out.qubits_ = std::move(ids);
  out.amplitudes_.resize(lhs.amplitudes_.size() * rhs.amplitudes_.size());
  const std::size_t stride = lhs.amplitudes_.size();
  for (std::size_t j = 0; j < rhs.amplitudes_.size(); ++j) {
    for (std::size_t i = 0; i < stride; ++i) {
      out.amplitudes_[j * stride + i] = lhs.amplitudes_[i] * rhs.amplitudes_[j];
    }
  }
  return out;
}

// (|0…0> + |1…1>)/√2 over ids in the given order. One id gives |+>.
inline StateVector ghz_state(std::span<const QubitId> ids) {
  if (ids.empty()) throw InvalidArgument("GHZ state needs at least one qubit");
  StateVector::check_distinct(ids);
  std::vector<Complex> amps(std::size_t{1} << ids.size());
  amps.front() = M_SQRT1_2;
  amps.back() = M_SQRT1_2;
  return StateVector::from_amplitudes({ids.begin(), ids.end()}, std::move(amps));
}

inline StateVector ghz_state(std::initializer_list<QubitId> ids) {
  return ghz_state(std::span<const QubitId>(ids.begin(), ids.size()));
}

enum class GateKind { X, Z, H, CNOT };

struct Gate {
  GateKind kind;
  QubitId first;   // target, or control for CNOT
  QubitId second;  // CNOT target; unused otherwise

  static Gate x(QubitId q) { return {GateKind::X, q, {}}; }
  static Gate z(QubitId q) { return {GateKind::Z, q, {}}; }
  static Gate h(QubitId q) { return {GateKind::H, q, {}}; }
  static Gate cnot(QubitId control, QubitId target) {
    if (control == target) throw InvalidArgument("CNOT operands must differ");
    return {GateKind::CNOT, control, target};
  }

  std::size_t arity() const noexcept { return kind == GateKind::CNOT ? 2 : 1; }

  std::vector<QubitId> operands() const {
    if (kind == GateKind::CNOT) return {first, second};
    return {first};
  }

  friend bool operator==(const Gate&, const Gate&) = default;
};

inline std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::CNOT: return "CNOT";
  }
  return "?";
}

inline StateVector apply_gate(StateVector sv, const Gate& g) {
  auto& amps = StateAccess::amplitudes(sv);
  const std::size_t half = amps.size() / 2;
  const std::size_t p = sv.position(g.first);
  const std::size_t mask = std::size_t{1} << p;
  switch (g.kind) {
    case GateKind::X:
      for (std::size_t k = 0; k < half; ++k) {
        const std::size_t i = detail::insert_zero_bit(k, p);
        std::swap(amps[i], amps[i | mask]);
      }
      break;
    case GateKind::Z:
      for (std::size_t k = 0; k < half; ++k) {
        amps[detail::insert_zero_bit(k, p) | mask] *= -1.0;
      }
      break;
    case GateKind::H:
      for (std::size_t k = 0; k < half; ++k) {
        const std::size_t i = detail::insert_zero_bit(k, p);
        const Complex a0 = amps[i];
        const Complex a1 = amps[i | mask];
        amps[i] = (a0 + a1) * M_SQRT1_2;
        amps[i | mask] = (a0 - a1) * M_SQRT1_2;
      }
      break;
    case GateKind::CNOT: {
      const std::size_t t = sv.position(g.second);
      if (t == p) throw InvalidArgument("CNOT operands must differ");
      const std::size_t tmask = std::size_t{1} << t;
      const std::size_t lo = std::min(p, t);
      const std::size_t hi = std::max(p, t);
      const std::size_t quarter = amps.size() / 4;
      for (std::size_t k = 0; k < quarter; ++k) {
        const std::size_t i =
            detail::insert_zero_bit(detail::insert_zero_bit(k, lo), hi) | mask;
        std::swap(amps[i], amps[i | tmask]);
      }
      break;
    }
  }
  return sv;
}

struct MeasurementOutcome {
  QubitId qubit;
  int bit = 0;
  double probability = 0.0;
};

// Picks an outcome bit given the two branch probabilities.
using BranchSelector = std::function<int(double p0, double p1)>;

inline BranchSelector force_bit(int bit) {
  return [bit](double, double) { return bit; };
}

// 53 random bits mapped to [0, 1); independent of the standard library's
// distribution implementations so sampled runs are portable.
inline double unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

template <class Engine>
BranchSelector sample_with(Engine& engine) {
  return [&engine](double p0, double p1) {
    if (p1 <= kProbabilityTolerance) return 0;
    if (p0 <= kProbabilityTolerance) return 1;
    return unit_interval(engine()) < p0 ? 0 : 1;
  };
}

namespace detail {

inline std::pair<double, double> branch_probabilities(const StateVector& sv, std::size_t p) {
  const auto amps = sv.amplitudes();
  const std::size_t mask = std::size_t{1} << p;
  double p0 = 0.0;
  double p1 = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    (i & mask ? p1 : p0) += std::norm(amps[i]);
  }
  return {p0, p1};
}

inline StateVector project(StateVector sv, std::size_t p, int bit, double probability) {
  auto& amps = StateAccess::amplitudes(sv);
  const std::size_t mask = std::size_t{1} << p;
  const double scale = 1.0 / std::sqrt(probability);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const bool set = (i & mask) != 0;
    if (set == (bit == 1)) {
      amps[i] *= scale;
    } else {
      amps[i] = 0.0;
    }
  }
  return sv;
}

}  // namespace detail

// Computational-basis measurement. The qubit stays in the register, collapsed.
inline std::pair<MeasurementOutcome, StateVector> measure(const StateVector& sv, QubitId q,
                                                          const BranchSelector& choose) {
  const std::size_t p = sv.position(q);
  const auto [p0, p1] = detail::branch_probabilities(sv, p);
  const int bit = choose(p0, p1);
  if (bit != 0 && bit != 1) throw InvalidArgument("outcome must be 0 or 1");
  const double prob = bit == 0 ? p0 : p1;
  if (prob <= kProbabilityTolerance) {
    throw InvalidArgument("outcome " + std::to_string(bit) + " of " + to_string(q) +
                          " has zero probability");
  }
  return {MeasurementOutcome{q, bit, prob}, detail::project(sv, p, bit, prob)};
}

inline std::vector<std::pair<MeasurementOutcome, StateVector>> enumerate_branches(
    const StateVector& sv, QubitId q) {
  const std::size_t p = sv.position(q);
  const auto [p0, p1] = detail::branch_probabilities(sv, p);
  std::vector<std::pair<MeasurementOutcome, StateVector>> out;
  if (p0 > kProbabilityTolerance) out.push_back(measure(sv, q, force_bit(0)));
  if (p1 > kProbabilityTolerance) out.push_back(measure(sv, q, force_bit(1)));
  return out;
}

// Copy of sv with its qubits listed in `order` (a permutation of sv's qubits).
inline StateVector reordered(const StateVector& sv, std::span<const QubitId> order) {
  if (order.size() != sv.qubit_count()) throw InvalidArgument("qubit-set mismatch");
  std::vector<std::size_t> source(order.size());
  for (std::size_t b = 0; b < order.size(); ++b) {
    if (!sv.contains(order[b])) throw InvalidArgument("qubit-set mismatch");
    source[b] = sv.position(order[b]);
  }
  StateVector::check_distinct(order);
  const auto amps = sv.amplitudes();
  std::vector<Complex> out(amps.size());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    std::size_t j = 0;
    for (std::size_t b = 0; b < source.size(); ++b) {
      j |= ((i >> source[b]) & 1u) << b;
    }
    out[j] = amps[i];
  }
  StateVector result = sv;
  StateAccess::qubits(result).assign(order.begin(), order.end());
  StateAccess::amplitudes(result) = std::move(out);
  return result;
}

// <lhs|rhs>, aligned by QubitId.
inline Complex inner_product(const StateVector& lhs, const StateVector& rhs) {
  const StateVector aligned = reordered(rhs, lhs.qubits());
  Complex s{};
  const auto a = lhs.amplitudes();
  const auto b = aligned.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// |<target|sv>|^2; insensitive to global phase and qubit order.
inline double fidelity(const StateVector& sv, const StateVector& target) {
  if (sv.qubit_count() != target.qubit_count()) throw InvalidArgument("qubit-set mismatch");
  return std::norm(inner_product(target, sv));
}

// Reduced density matrix on `subset`; row/column bit b addresses subset[b].
inline Eigen::MatrixXcd reduced_density_matrix(const StateVector& sv,
                                               std::span<const QubitId> subset) {
  StateVector::check_distinct(subset);
  std::vector<std::size_t> kept;
  std::vector<std::size_t> traced;
  std::vector<bool> in_subset(sv.qubit_count(), false);
  for (QubitId q : subset) {
    const std::size_t p = sv.position(q);
    kept.push_back(p);
    in_subset[p] = true;
  }
  for (std::size_t p = 0; p < sv.qubit_count(); ++p) {
    if (!in_subset[p]) traced.push_back(p);
  }
  const auto gather = [](std::size_t i, const std::vector<std::size_t>& positions) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < positions.size(); ++b) r |= ((i >> positions[b]) & 1u) << b;
    return r;
  };
  const auto amps = sv.amplitudes();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(Eigen::Index{1} << kept.size(),
                                              Eigen::Index{1} << traced.size());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    m(static_cast<Eigen::Index>(gather(i, kept)), static_cast<Eigen::Index>(gather(i, traced))) =
        amps[i];
  }
  return m * m.adjoint();
}

// Von Neumann entropy in bits of the reduced state on `subset`.
inline double cut_entropy(const StateVector& sv, std::span<const QubitId> subset) {
  if (subset.empty() || subset.size() >= sv.qubit_count()) {
    throw InvalidArgument("cut must be a nonempty proper subset");
  }
  for (QubitId q : subset) (void)sv.position(q);
  std::vector<QubitId> side(subset.begin(), subset.end());
  // Both sides of a pure-state cut share a spectrum; diagonalise the smaller.
  if (2 * side.size() > sv.qubit_count()) {
    std::vector<QubitId> complement;
    for (QubitId q : sv.qubits()) {
      if (std::find(side.begin(), side.end(), q) == side.end()) complement.push_back(q);
    }
    side = std::move(complement);
  }
  const Eigen::MatrixXcd rho = reduced_density_matrix(sv, side);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()(i);
    if (lambda > 1e-15) entropy -= lambda * std::log2(lambda);
  }
  return std::max(entropy, 0.0);
}

inline double cut_entropy(const StateVector& sv, std::initializer_list<QubitId> subset) {
  return cut_entropy(sv, std::span<const QubitId>(subset.begin(), subset.size()));
}

// Removes a qubit that is in a product state with the rest of the register.
inline StateVector discard_qubit(const StateVector& sv, QubitId q) {
  const std::size_t p = sv.position(q);
  const QubitId single[] = {q};
  const Eigen::MatrixXcd rho = reduced_density_matrix(sv, single);
  const double purity = (rho * rho).trace().real();
  if (purity < 1.0 - kFidelityTolerance) {
    throw ResidualEntanglement(to_string(q) + " is still entangled with the register");
  }
  // The remainder is the same in either branch; take the likelier one.
  const auto [p0, p1] = detail::branch_probabilities(sv, p);
  const std::size_t bit = p1 > p0 ? 1 : 0;
  const double scale = 1.0 / std::sqrt(bit ? p1 : p0);
  const auto amps = sv.amplitudes();
  std::vector<Complex> rest(amps.size() / 2);
  for (std::size_t k = 0; k < rest.size(); ++k) {
    rest[k] = amps[detail::insert_zero_bit(k, p) | (bit << p)] * scale;
  }
  StateVector out = sv;
  auto& ids = StateAccess::qubits(out);
  ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(p));
  StateAccess::amplitudes(out) = std::move(rest);
  return out;
}

}  // namespace ghznet
